#pragma once

namespace qcr::constants {

// CODATA 2018 exact values. Every module reads physical constants from here;
// internal units are strict SI throughout the library.
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double boltzmann = 1.380649e-23;             // J / K

// Resistance quantum h/e^2, about 25812.807 ohm.
inline constexpr double resistance_quantum =
    planck / (elementary_charge * elementary_charge);

// Unit factors used at configuration and CLI boundaries only.
inline constexpr double micro_ev = 1e-6 * elementary_charge;  // J per ueV
inline constexpr double giga_hertz = 1e9;                     // Hz per GHz
inline constexpr double femto_farad = 1e-15;                  // F per fF
inline constexpr double kilo_ohm = 1e3;                       // ohm per kohm
inline constexpr double micro_volt = 1e-6;                    // V per uV
inline constexpr double nanosecond = 1e-9;                    // s per ns

}  // namespace qcr::constants

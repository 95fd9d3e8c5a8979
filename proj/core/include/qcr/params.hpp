#pragma once

#include <cstdint>
#include <string>

namespace qcr {

// Physical parameters of one refrigerator-loaded resonator device. All values
// are strict SI (ohm, kelvin, farad, hertz, joule); unit conversion happens
// only at the JSON/CLI boundary.
struct DeviceParams {
  double tunnel_resistance = 0.0;    // R_T, ohm, per NIS junction
  double electron_temperature = 0.0; // T_N, K, normal-metal island
  double dynes_parameter = 0.0;      // gamma_D, dimensionless
  double resonator_impedance = 0.0;  // Z_r, ohm, characteristic impedance
  double coupling_capacitance = 0.0; // C_c, F, refrigerator-resonator coupling
  double junction_capacitance = 0.0; // C_m, F, single NIS junction
  double mode_frequency = 0.0;       // f_0, Hz, fundamental resonator mode
  double gap_energy = 0.0;           // Delta, J, superconducting gap

  friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

// Quantities computed from DeviceParams once and reused everywhere.
struct DerivedParams {
  double coupling_fraction = 0.0;    // alpha_c = C_c / (C_c + 2 C_m)
  double interaction_parameter = 0.0;// rho = pi alpha_c^2 Z_r / R_K
  double photon_energy = 0.0;        // h f_0, J
  double resistance_quantum = 0.0;   // R_K = h / e^2, ohm

  friend bool operator==(const DerivedParams&, const DerivedParams&) = default;
};

// Fixed environmental damping channels of the resonator mode.
struct EnvironmentRates {
  double line_damping = 1.2e7;       // gamma_tr, 1/s, to the transmission line
  double excess_fraction = 0.10;     // gamma_x as a fraction of gamma_tr
  double off_state_damping = 0.0;    // residual refrigerator damping at V=0

  double excess_damping() const { return excess_fraction * line_damping; }
  // Pulse-independent damping floor: line + excess. The off-state term is
  // accounted for separately because it switches with the pulse window.
  double background() const { return line_damping + excess_damping(); }

  friend bool operator==(const EnvironmentRates&,
                         const EnvironmentRates&) = default;
};

// Full configuration document: device plus environment.
struct Config {
  DeviceParams device;
  EnvironmentRates environment;

  friend bool operator==(const Config&, const Config&) = default;
};

// Validates invariants; throws ConfigError naming the offending field.
// Rules: every field strictly positive, dynes_parameter < 1, and the photon
// energy h*f_0 strictly below the gap.
void validate(const DeviceParams& params);
void validate(const EnvironmentRates& env);

// Pure function of DeviceParams; bit-identical on identical input.
DerivedParams derive(const DeviceParams& params);

// JSON (de)serialization. Field names carry explicit unit suffixes:
//   R_T_kohm, T_N_K, gamma_D, Z_r_ohm, C_c_fF, C_m_fF, f0_GHz, Delta_ueV
// and for the environment block:
//   gamma_tr_1_per_s, gamma_x_fraction, gamma_qcr_off_1_per_s.
// Loaders validate invariants and throw ConfigError with a named field.
DeviceParams load_device_params(const std::string& json_text);
std::string write_device_params(const DeviceParams& params);

Config load_config(const std::string& json_text);
Config load_config_file(const std::string& path);
std::string write_config(const Config& config);

// Stable 64-bit fingerprint of the device parameters (canonical shortest
// round-trip serialization, field order fixed). Embedded in output metadata.
std::uint64_t params_hash(const DeviceParams& params);

}  // namespace qcr

#pragma once

namespace qcr::reference {

// Published characterization of the reference device. The report command and
// the acceptance checks compare simulated and extracted quantities against
// these anchors; tolerances live next to the checks that use them.

// Strongest measured refrigerator damping (near the top of the bias sweep).
inline constexpr double measured_max_damping = 6.7e8;        // 1/s
inline constexpr double measured_max_damping_sigma = 0.7e8;  // 1/s

// Weakest measured refrigerator damping (lowest resolvable bias).
inline constexpr double measured_min_damping = 1.6e7;        // 1/s
inline constexpr double measured_min_damping_sigma = 0.5e7;  // 1/s

// Transmission-line damping from the pre-pulse decay.
inline constexpr double measured_line_damping = 1.2e7;        // 1/s
inline constexpr double measured_line_damping_sigma = 0.1e7;  // 1/s

// Zero-bias refrigerator damping predicted by theory for the device.
inline constexpr double theory_off_damping = 1.1e5;  // 1/s

// Reported damping tunability (max refrigerator damping over line damping).
inline constexpr double reported_tunability = 56.0;
inline constexpr double reported_tunability_sigma = 8.0;

// Nominal pulse shape of the reference experiment.
inline constexpr double nominal_edge_ns = 1.25;          // rise = fall
inline constexpr double nominal_plateau_fraction = 0.8;  // of 2*Delta/e

// Width of the distortion-induced flat region at the nominal pulse shape.
inline constexpr double expected_flat_region_ns = 8.0;

}  // namespace qcr::reference

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qcr/params.hpp"

namespace qcr {

// One bias pulse with sine-squared rise/fall edges. The edges are part of the
// total width: the plateau lasts width - rise_time - fall_time. All times in
// seconds, voltage in volts.
struct BiasPulse {
  double plateau_voltage = 0.0;  // V_p
  double width = 0.0;            // tau, edges included
  double rise_time = 0.0;        // dt_rise
  double fall_time = 0.0;        // dt_fall
  double start_time = 0.0;       // t_start

  double end_time() const { return start_time + width; }

  friend bool operator==(const BiasPulse&, const BiasPulse&) = default;
};

// Throws ConfigError unless width >= rise_time + fall_time, all durations are
// nonnegative, and the plateau voltage is finite.
void validate(const BiasPulse& pulse);

// Instantaneous undistorted pulse voltage: 0 outside [t_start, t_start+tau],
// V_p * sin^2(pi (t - t_start) / (2 dt_rise)) on the rise, V_p on the
// plateau, the mirrored sine-squared on the fall. Continuous whenever the
// edge durations are positive.
double pulse_voltage(double t, const BiasPulse& pulse);

// Single-pole low-pass distortion of a uniformly sampled waveform
// (discrete exponential smoothing y[n] = y[n-1] + a (x[n] - y[n-1]) with
// a = 1 - exp(-dt/tau_c), primed with y[-1] = x[0]). tau_c = 0 is the
// identity.
std::vector<double> distort(const std::vector<double>& samples, double dt,
                            double tau_c);

// Continuous-time counterpart used by the evolution: the exact response of
// the same single-pole filter to the analytic pulse shape, evaluated by
// piecewise-adaptive convolution. tau_c = 0 returns pulse_voltage(t).
double distorted_voltage(double t, const BiasPulse& pulse, double tau_c);

// Maps the (distorted) instantaneous bias voltage to the refrigerator's
// damping contribution in 1/s. Implementations must accept any value between
// 0 and the pulse plateau voltage.
using DampingModel = std::function<double(double)>;

// Full experiment schedule. `drive_end` is the reference instant (amplitude
// normalized to 1 there); `probe_before`/`probe_after` are the fixed analysis
// times bracketing the pulse; `end_time` bounds the simulation.
struct Timeline {
  double drive_end = 0.0;
  BiasPulse pulse;
  double probe_before = 0.0;  // t_b
  double probe_after = 0.0;   // t_a
  double end_time = 0.0;      // >= probe_after
  EnvironmentRates environment;

  friend bool operator==(const Timeline&, const Timeline&) = default;
};

// Invariants: drive_end <= probe_before < pulse start, pulse end <
// probe_after <= end_time, and pulse width < probe_after - probe_before.
// Throws ConfigError naming the violated relation.
void validate(const Timeline& timeline);

// Stable fingerprint over every field (canonical float serialization).
std::uint64_t timeline_hash(const Timeline& timeline);

// Total damping of the resonator mode at time t: transmission line + excess
// + refrigerator response to the distorted pulse voltage.
double total_damping(double t, const Timeline& timeline,
                     const DampingModel& model, double tau_c);

// Densely sampled amplitude decay. Node times are the integrator steps;
// between nodes amplitude_at() evaluates the cubic Hermite interpolant using
// the exact nodal derivative A' = -gamma A / 2, keeping interpolation error
// far below the integration tolerance.
struct AmplitudeTrajectory {
  std::vector<double> times;       // s, strictly increasing
  std::vector<double> amplitudes;  // normalized, A(drive_end) = 1
  // One-sided total damping at each node (1/s). The two differ only at nodes
  // where gamma_tot jumps (rectangular pulse edges); at the first/last node
  // the missing side mirrors the existing one.
  std::vector<double> damping_before;  // limit from t -> node^-
  std::vector<double> damping_after;   // limit from t -> node^+

  double amplitude_at(double t) const;
  // ln(A(t_num) / A(t_den))
  double log_amplitude_ratio(double t_num, double t_den) const;
};

// Integrates dA/dt = -gamma_tot(t) A / 2 together with the pulse-distortion
// filter state from drive_end to end_time (classic fourth-order Runge-Kutta,
// steps aligned to every pulse-segment boundary so discontinuities never fall
// inside a step). The model is evaluated only for voltages in [0, V_p].
AmplitudeTrajectory evolve_amplitude(const Timeline& timeline,
                                     const DampingModel& model,
                                     double tau_c = 0.0);

// Analysis-side rate triple entering the closed-form log-ratio model.
struct AnalysisRates {
  double qcr_on = 0.0;          // plateau damping, 1/s
  double edge_effective = 0.0;  // time-averaged damping over rise+fall, 1/s
  double qcr_off = 0.0;         // residual refrigerator damping off-pulse, 1/s
};

// Closed-form prediction of ln(A(t_a)/A(t_b)) for a pulse inside the probe
// window:
//   -1/2 [ qcr_on (tau - rise - fall) + (gamma_tr + gamma_x)(t_a - t_b)
//          + edge_effective (rise + fall) + qcr_off (t_a - t_b - tau) ].
double predicted_log_ratio(const Timeline& timeline,
                           const AnalysisRates& rates);

// Time average of model(pulse_voltage(t)) over the rise and fall windows
// (undistorted edges); returns model(0) when both edges have zero duration.
// Always lies between the extremes of the model over [0, V_p].
double edge_average_damping(const BiasPulse& pulse, const DampingModel& model);

}  // namespace qcr

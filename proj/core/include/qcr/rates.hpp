#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qcr/monotone_cubic.hpp"
#include "qcr/params.hpp"
#include "qcr/tunneling.hpp"

namespace qcr {

// Photon exchange rates of the refrigerator at one bias point.
struct TransitionRates {
  double photon_absorption = 0.0;  // Gamma_down, 1/s (photon leaves resonator)
  double photon_emission = 0.0;    // Gamma_up, 1/s (photon enters resonator)
};

struct RatePoint {
  double bias_voltage = 0.0;           // V across the junction pair
  double photon_absorption = 0.0;      // 1/s
  double photon_emission = 0.0;        // 1/s
  double damping = 0.0;                // gamma_qcr = down - up, 1/s
  double effective_temperature = 0.0;  // K
};

struct RateCurve {
  std::vector<RatePoint> points;   // strictly increasing bias grid
  std::uint64_t device_hash = 0;   // params_hash of the producing device
};

// Leading-order photon absorption/emission rates for a symmetric two-junction
// bias split (V/2 per junction):
//   Gamma_down = rho * (2 R_K / R_T) * [F(+eV/2 + h f0) + F(-eV/2 + h f0)],
//   Gamma_up   = rho * (2 R_K / R_T) * [F(+eV/2 - h f0) + F(-eV/2 - h f0)].
// Both rates are strictly positive and even in V (bit-exactly: negating V
// swaps the two commutative kernel terms). Precondition |eV| <= 10*Delta.
TransitionRates transition_rates(double bias_voltage, const DerivedParams& d,
                                 const TunnelKernelParams& k);

// gamma_qcr(V) = Gamma_down - Gamma_up; nonnegative at equal electrode
// temperatures and even in V.
double qcr_damping(double bias_voltage, const DerivedParams& d,
                   const TunnelKernelParams& k);

// Effective photon-bath temperature T = h f0 / (k_B ln(down/up)).
// Throws NoCoolingError when emission >= absorption.
double effective_temperature(const TransitionRates& rates,
                             double photon_energy);
double effective_temperature(double bias_voltage, const DerivedParams& d,
                             const TunnelKernelParams& k);

// Evaluates all rates over a strictly increasing bias grid. Grid points are
// independent; with jobs > 1 they are computed by a small thread pool, and
// the output order always matches the input order. Failures are rethrown
// with the offending bias voltage named.
RateCurve rate_curve(const std::vector<double>& bias_grid,
                     const DeviceParams& device, int jobs = 1);

// CSV with mandatory header
//   eV_over_2Delta,V_uV,Gamma_down_1_per_s,Gamma_up_1_per_s,gamma_qcr_1_per_s,T_eff_K
// and 9 significant digits per value, locale-independent.
void write_rate_curve_csv(const RateCurve& curve, double gap_energy,
                          std::ostream& out);

// Smooth evaluation of gamma_qcr at arbitrary bias from a tabulated curve:
// shape-preserving cubic interpolation of ln(gamma) versus |V| (the curve is
// even in V and spans many decades). Queries beyond the tabulated range
// throw RangeError — never extrapolates.
class DampingInterpolator {
 public:
  DampingInterpolator() = default;
  explicit DampingInterpolator(const RateCurve& curve);

  double operator()(double bias_voltage) const;

  double max_bias() const { return spline_.max_x(); }

 private:
  MonotoneCubic spline_;
};

}  // namespace qcr

#pragma once

#include <cstddef>
#include <vector>

#include "qcr/trace.hpp"

namespace qcr {

// One pulse-width sweep sample: ln(A(t_a)/A(t_b)) at pulse width tau.
struct SweepPoint {
  double tau_ns = 0.0;
  double log_ratio = 0.0;
  double sigma_y = 0.0;  // propagated noise std of log_ratio; 0 when unknown
};

// Straight-line fit y = intercept + slope * x.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double sigma_intercept = 0.0;
  double sigma_slope = 0.0;
  double residual_rms = 0.0;
  std::size_t n = 0;
};

// Weighted least squares with known per-point standard deviations
// (covariance from the weights, no chi-square rescaling). Pass an empty
// sigma vector for ordinary least squares, where the covariance is scaled by
// the residual variance instead. Throws FitError for n < 2, non-positive
// sigmas, or a degenerate x range.
LineFit fit_weighted_line(const std::vector<double>& x,
                          const std::vector<double>& y,
                          const std::vector<double>& sigma_y);

// A fitted damping rate with 1-sigma uncertainty and fit diagnostics.
struct DampingEstimate {
  double gamma = 0.0;             // 1/s
  double sigma = 0.0;             // 1/s, floored at a tiny positive value
  double breakpoint_tau_ns = 0.0; // last flat tau; 0 when no flat region
  std::size_t n_points_used = 0;
  double residual_rms = 0.0;
};

// Exponential fit of the free decay before the pulse: weighted straight-line
// fit of ln A versus t over times_ns in [t0_ns, t1_ns], gamma = -2 * slope.
// The result is the total background rate (line + excess damping; a single
// decay cannot separate them). Requires >= 10 samples, all positive.
DampingEstimate fit_pre_pulse(const Trace& trace, double t0_ns, double t1_ns);

// Builds sweep points from one trace per pulse width. Traces and widths are
// paired by index; every trace must cover t_b and t_a with a sample within
// half a sampling period. sigma_y is propagated from the trace noise model
// (sigma/sqrt(n_avg) per amplitude) when present.
std::vector<SweepPoint> log_ratio_points(const std::vector<Trace>& traces,
                                         const std::vector<double>& taus_ns,
                                         double t_b_ns, double t_a_ns);

// Splits the sweep into {flat prefix of k points} + {linear tail} by
// exhaustive scan of k in [0, n-3], minimizing the summed squared error of
// a constant fit on the prefix plus a straight-line fit on the tail; ties go
// to the smallest k. The winning tail must slope significantly downward
// (slope < 0 and |slope| > 3 sigma_slope), otherwise
// InsufficientLinearRegionError is thrown (all-flat input has no usable
// linear region). Requires >= 6 points with strictly increasing tau.
std::size_t detect_flat_region(const std::vector<SweepPoint>& points);

// Weighted straight-line fit on the points past the breakpoint;
// gamma = -2 * slope (1/s). The fitted value is the damping contrast between
// pulse-on and pulse-off; with negligible off-state damping it equals the
// on-state rate. Requires >= 3 points past the breakpoint.
DampingEstimate fit_gamma_qcr(const std::vector<SweepPoint>& points,
                              std::size_t breakpoint);

struct RatioEstimate {
  double ratio = 0.0;
  double sigma = 0.0;
  // Set when the denominator is within 3 sigma of zero; the ratio is then
  // reported but barely meaningful.
  bool poorly_resolved_denominator = false;
};

// ratio = num/den with first-order error propagation
// sigma = ratio * sqrt((sn/n)^2 + (sd/d)^2). Throws FitError for den <= 0.
RatioEstimate tunability_ratio(const DampingEstimate& num,
                               const DampingEstimate& den);

}  // namespace qcr

#include "qcr/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qcr/constants.hpp"
#include "qcr/errors.hpp"

namespace qcr {

namespace {

// Keeps reported uncertainties strictly positive so downstream ratios and
// pulls never divide by zero; only bites for numerically perfect fits.
constexpr double sigma_floor = 1e-30;

double propagated_amplitude_sigma(const TraceMeta& meta) {
  if (meta.noise_sigma <= 0.0) return 0.0;
  return meta.noise_sigma / std::sqrt(static_cast<double>(meta.n_avg));
}

std::size_t nearest_sample(const Trace& trace, double t_ns,
                           const char* label) {
  if (trace.times_ns.size() < 2) {
    throw FitError(std::string("log_ratio_points: trace too short for ") +
                   label);
  }
  const auto it = std::lower_bound(trace.times_ns.begin(),
                                   trace.times_ns.end(), t_ns);
  std::size_t best;
  if (it == trace.times_ns.begin()) {
    best = 0;
  } else if (it == trace.times_ns.end()) {
    best = trace.times_ns.size() - 1;
  } else {
    const std::size_t hi = static_cast<std::size_t>(it - trace.times_ns.begin());
    best = (trace.times_ns[hi] - t_ns < t_ns - trace.times_ns[hi - 1])
               ? hi
               : hi - 1;
  }
  const double dt = trace.times_ns[1] - trace.times_ns[0];
  if (std::abs(trace.times_ns[best] - t_ns) > 0.5 * dt * (1.0 + 1e-9)) {
    throw FitError(std::string("log_ratio_points: missing sample at ") +
                   label);
  }
  return best;
}

}  // namespace

LineFit fit_weighted_line(const std::vector<double>& x,
                          const std::vector<double>& y,
                          const std::vector<double>& sigma_y) {
  const std::size_t n = x.size();
  if (y.size() != n) {
    throw FitError("fit_weighted_line: x/y length mismatch");
  }
  const bool weighted = !sigma_y.empty();
  if (weighted && sigma_y.size() != n) {
    throw FitError("fit_weighted_line: sigma length mismatch");
  }
  if (n < 2) {
    throw FitError("fit_weighted_line: need at least 2 points");
  }

  // Weighted means first, then sums over centered x: numerically stable and
  // yields a diagonal covariance in (mean, slope).
  double sum_w = 0.0, mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (weighted) {
      if (!(sigma_y[i] > 0.0)) {
        throw FitError("fit_weighted_line: non-positive sigma");
      }
      w = 1.0 / (sigma_y[i] * sigma_y[i]);
    }
    sum_w += w;
    mean_x += w * x[i];
    mean_y += w * y[i];
  }
  mean_x /= sum_w;
  mean_y /= sum_w;

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weighted ? 1.0 / (sigma_y[i] * sigma_y[i]) : 1.0;
    const double dx = x[i] - mean_x;
    sxx += w * dx * dx;
    sxy += w * dx * (y[i] - mean_y);
  }
  if (!(sxx > 0.0)) {
    throw FitError("fit_weighted_line: degenerate x range (all x equal)");
  }

  LineFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;

  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += r * r;
  }
  fit.residual_rms = std::sqrt(ssr / static_cast<double>(n));

  double var_slope, var_mean;
  if (weighted) {
    // Known noise: covariance from the weights alone.
    var_slope = 1.0 / sxx;
    var_mean = 1.0 / sum_w;
  } else {
    // Unknown noise: scale by the residual variance (n-2 dof).
    const double s2 =
        n > 2 ? ssr / static_cast<double>(n - 2)
              : 0.0;
    var_slope = s2 / sxx;
    var_mean = s2 / static_cast<double>(n);
  }
  fit.sigma_slope = std::sqrt(var_slope);
  fit.sigma_intercept = std::sqrt(var_mean + mean_x * mean_x * var_slope);
  return fit;
}

DampingEstimate fit_pre_pulse(const Trace& trace, double t0_ns, double t1_ns) {
  if (trace.times_ns.size() != trace.amplitudes.size()) {
    throw LengthMismatchError("fit_pre_pulse: malformed trace");
  }
  std::vector<double> x, y, sigma;
  const double amp_sigma = propagated_amplitude_sigma(trace.meta);
  for (std::size_t i = 0; i < trace.times_ns.size(); ++i) {
    const double t = trace.times_ns[i];
    if (t < t0_ns || t > t1_ns) continue;
    const double a = trace.amplitudes[i];
    if (!(a > 0.0)) {
      throw FitError("fit_pre_pulse: non-positive amplitude in window");
    }
    x.push_back(t * constants::nanosecond);  // seconds
    y.push_back(std::log(a));
    if (amp_sigma > 0.0) sigma.push_back(amp_sigma / a);
  }
  if (x.size() < 10) {
    throw FitError("fit_pre_pulse: fewer than 10 samples in window");
  }
  const LineFit fit = fit_weighted_line(x, y, sigma);

  DampingEstimate estimate;
  estimate.gamma = -2.0 * fit.slope;
  estimate.sigma = std::max(2.0 * fit.sigma_slope, sigma_floor);
  estimate.breakpoint_tau_ns = 0.0;
  estimate.n_points_used = fit.n;
  estimate.residual_rms = fit.residual_rms;
  return estimate;
}

std::vector<SweepPoint> log_ratio_points(const std::vector<Trace>& traces,
                                         const std::vector<double>& taus_ns,
                                         double t_b_ns, double t_a_ns) {
  if (traces.size() != taus_ns.size()) {
    throw LengthMismatchError(
        "log_ratio_points: one pulse width per trace required");
  }
  if (!(t_a_ns > t_b_ns)) {
    throw FitError("log_ratio_points: t_a must exceed t_b");
  }
  std::vector<SweepPoint> points;
  points.reserve(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (!(taus_ns[i] < t_a_ns - t_b_ns)) {
      throw FitError("log_ratio_points: tau >= t_a - t_b at index " +
                     std::to_string(i));
    }
    const Trace& trace = traces[i];
    const std::size_t ib = nearest_sample(trace, t_b_ns, "t_b");
    const std::size_t ia = nearest_sample(trace, t_a_ns, "t_a");
    const double before = trace.amplitudes[ib];
    const double after = trace.amplitudes[ia];
    if (!(before > 0.0) || !(after > 0.0)) {
      throw FitError("log_ratio_points: non-positive amplitude at index " +
                     std::to_string(i));
    }
    SweepPoint point;
    point.tau_ns = taus_ns[i];
    point.log_ratio = std::log(after / before);
    const double amp_sigma = propagated_amplitude_sigma(trace.meta);
    point.sigma_y = amp_sigma > 0.0
                        ? amp_sigma * std::sqrt(1.0 / (after * after) +
                                                1.0 / (before * before))
                        : 0.0;
    points.push_back(point);
  }
  return points;
}

std::size_t detect_flat_region(const std::vector<SweepPoint>& points) {
  const std::size_t n = points.size();
  if (n < 6) {
    throw FitError("detect_flat_region: need at least 6 points");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(points[i].tau_ns < points[i + 1].tau_ns)) {
      throw FitError("detect_flat_region: tau must be strictly increasing");
    }
  }

  // Plain (unweighted) SSE of the two-piece model for each candidate split;
  // exhaustive scan is exact and deterministic on these small grids.
  auto sse_constant = [&](std::size_t lo, std::size_t hi) {
    if (hi - lo < 1) return 0.0;
    double mean = 0.0;
    for (std::size_t i = lo; i < hi; ++i) mean += points[i].log_ratio;
    mean /= static_cast<double>(hi - lo);
    double sse = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double r = points[i].log_ratio - mean;
      sse += r * r;
    }
    return sse;
  };
  auto sse_line = [&](std::size_t lo, std::size_t hi) {
    double sx = 0.0, sy = 0.0;
    const auto m = static_cast<double>(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      sx += points[i].tau_ns;
      sy += points[i].log_ratio;
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double dx = points[i].tau_ns - mx;
      sxx += dx * dx;
      sxy += dx * (points[i].log_ratio - my);
    }
    const double slope = sxy / sxx;
    double sse = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double r = points[i].log_ratio - my -
                       slope * (points[i].tau_ns - mx);
      sse += r * r;
    }
    return sse;
  };

  std::vector<double> sse_at_k;
  double best_sse = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 3 <= n; ++k) {
    const double sse = sse_constant(0, k) + sse_line(k, n);
    sse_at_k.push_back(sse);
    best_sse = std::min(best_sse, sse);
  }
  // Prefer the smallest k among near-ties.  An exact-equality tie rule is
  // defeated by rounding: on noiseless data every candidate SSE is pure
  // floating-point dust and the minimum lands on an arbitrary k.  Any SSE
  // within a tolerance far below meaningful residual scales (relative to the
  // squared data magnitude) counts as tied with the minimum.
  double scale_sq = 0.0;
  for (const auto& p : points) scale_sq += p.log_ratio * p.log_ratio;
  const double tie_tol = 1e-15 * scale_sq;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < sse_at_k.size(); ++k) {
    if (sse_at_k[k] <= best_sse + tie_tol) {
      best_k = k;
      break;
    }
  }

  // The tail must actually slope downward; otherwise (e.g. all-flat sweeps)
  // there is nothing to fit a rate from.
  std::vector<double> x, y, sigma;
  bool weighted = true;
  for (std::size_t i = best_k; i < n; ++i) {
    x.push_back(points[i].tau_ns);
    y.push_back(points[i].log_ratio);
    if (points[i].sigma_y > 0.0) {
      sigma.push_back(points[i].sigma_y);
    } else {
      weighted = false;
    }
  }
  if (!weighted) sigma.clear();
  const LineFit tail = fit_weighted_line(x, y, sigma);
  if (!(tail.slope < 0.0) ||
      !(std::abs(tail.slope) > 3.0 * tail.sigma_slope)) {
    throw InsufficientLinearRegionError(
        "insufficient linear region: no significant downward slope past the "
        "flat region");
  }
  return best_k;
}

DampingEstimate fit_gamma_qcr(const std::vector<SweepPoint>& points,
                              std::size_t breakpoint) {
  const std::size_t n = points.size();
  if (breakpoint > n || n - breakpoint < 3) {
    throw InsufficientLinearRegionError(
        "insufficient linear region: fewer than 3 points past the "
        "breakpoint");
  }
  std::vector<double> x, y, sigma;
  bool weighted = true;
  for (std::size_t i = breakpoint; i < n; ++i) {
    x.push_back(points[i].tau_ns * constants::nanosecond);  // seconds
    y.push_back(points[i].log_ratio);
    if (points[i].sigma_y > 0.0) {
      sigma.push_back(points[i].sigma_y);
    } else {
      weighted = false;
    }
  }
  if (!weighted) sigma.clear();
  const LineFit fit = fit_weighted_line(x, y, sigma);

  DampingEstimate estimate;
  estimate.gamma = -2.0 * fit.slope;
  estimate.sigma = std::max(2.0 * fit.sigma_slope, sigma_floor);
  estimate.breakpoint_tau_ns =
      breakpoint > 0 ? points[breakpoint - 1].tau_ns : 0.0;
  estimate.n_points_used = fit.n;
  estimate.residual_rms = fit.residual_rms;
  return estimate;
}

RatioEstimate tunability_ratio(const DampingEstimate& num,
                               const DampingEstimate& den) {
  if (!(den.gamma > 0.0)) {
    throw FitError("tunability_ratio: non-positive denominator");
  }
  RatioEstimate result;
  result.ratio = num.gamma / den.gamma;
  const double rn = num.sigma / num.gamma;
  const double rd = den.sigma / den.gamma;
  result.sigma = std::abs(result.ratio) * std::sqrt(rn * rn + rd * rd);
  result.poorly_resolved_denominator = den.gamma <= 3.0 * den.sigma;
  return result;
}

}  // namespace qcr

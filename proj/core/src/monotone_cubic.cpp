#include "qcr/monotone_cubic.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "qcr/errors.hpp"

namespace qcr {

namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

// One-sided three-point end slope, limited so the first interval stays
// monotone (the standard shape-preserving end treatment).
double edge_slope(double h0, double h1, double d0, double d1) {
  double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (sign(m) != sign(d0)) {
    m = 0.0;
  } else if (sign(d0) != sign(d1) && std::abs(m) > 3.0 * std::abs(d0)) {
    m = 3.0 * d0;
  }
  return m;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) {
    throw NumericsError("MonotoneCubic: need >= 2 nodes with matching sizes");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(x_[i] < x_[i + 1])) {
      throw NumericsError("MonotoneCubic: x must be strictly increasing");
    }
  }

  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    d[i] = (y_[i + 1] - y_[i]) / h[i];
  }

  slope_.assign(n, 0.0);
  if (n == 2) {
    slope_[0] = slope_[1] = d[0];
    return;
  }

  slope_[0] = edge_slope(h[0], h[1], d[0], d[1]);
  slope_[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] == 0.0 || d[i] == 0.0 || sign(d[i - 1]) != sign(d[i])) {
      slope_[i] = 0.0;
    } else {
      // Weighted harmonic mean of adjacent secants; keeps the interpolant
      // monotone on both neighboring intervals.
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      slope_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
}

double MonotoneCubic::operator()(double x) const {
  if (x_.empty()) {
    throw NumericsError("MonotoneCubic: evaluating a default-constructed "
                        "interpolant");
  }
  if (!(x >= x_.front() && x <= x_.back())) {
    throw RangeError("MonotoneCubic: query outside the tabulated range");
  }
  // Index of the interval [x_i, x_{i+1}] containing x.
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i =
      std::min<std::size_t>(x_.size() - 2,
                            static_cast<std::size_t>(
                                std::max<std::ptrdiff_t>(
                                    0, (it - x_.begin()) - 1)));

  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] +
         h11 * h * slope_[i + 1];
}

}  // namespace qcr

#include "qcr/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "qcr/errors.hpp"

namespace qcr {

namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
// Abscissae/weights are the standard double-precision values; the odd-indexed
// abscissae (0-based 1,3,5,7) form the embedded Gauss rule.
constexpr double kron_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kron_w[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;  // Kronrod estimate
  double error = 0.0;  // |Kronrod - Gauss|
};

Panel evaluate_panel(const std::function<double(double)>& f, double lo,
                     double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  const double f_center = f(center);
  double kronrod = kron_w[7] * f_center;
  double gauss = gauss_w[3] * f_center;

  for (int i = 0; i < 7; ++i) {
    const double dx = half * kron_x[i];
    const double f_sum = f(center - dx) + f(center + dx);
    kronrod += kron_w[i] * f_sum;
    if (i % 2 == 1) {
      gauss += gauss_w[i / 2] * f_sum;
    }
  }

  if (!std::isfinite(kronrod)) {
    throw NumericsError(
        "integrate_adaptive: integrand returned a non-finite value");
  }

  Panel panel;
  panel.lo = lo;
  panel.hi = hi;
  panel.value = kronrod * half;
  panel.error = std::abs((kronrod - gauss) * half);
  return panel;
}

struct PanelOrder {
  bool operator()(const Panel& a, const Panel& b) const {
    if (a.error != b.error) return a.error < b.error;
    return a.lo > b.lo;  // deterministic tie-break: leftmost panel first
  }
};

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::vector<double> breakpoints,
                                    const QuadratureOptions& options) {
  if (breakpoints.size() < 2) {
    throw NumericsError("integrate_adaptive needs at least two breakpoints");
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                    breakpoints.end());
  if (breakpoints.size() < 2) {
    return {0.0, 0.0, 0};  // degenerate zero-width interval
  }
  for (double b : breakpoints) {
    if (!std::isfinite(b)) {
      throw NumericsError("integrate_adaptive: non-finite breakpoint");
    }
  }

  std::priority_queue<Panel, std::vector<Panel>, PanelOrder> queue;
  double total_value = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    Panel panel = evaluate_panel(f, breakpoints[i], breakpoints[i + 1]);
    total_value += panel.value;
    total_error += panel.error;
    queue.push(panel);
  }

  auto tolerance = [&] {
    return std::max(options.abs_tol,
                    options.rel_tol * std::abs(total_value));
  };

  while (total_error > tolerance() && queue.size() < options.max_panels) {
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      // Interval narrower than machine precision: cannot subdivide further.
      queue.push(worst);
      break;
    }
    Panel left = evaluate_panel(f, worst.lo, mid);
    Panel right = evaluate_panel(f, mid, worst.hi);
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  QuadratureResult result;
  result.value = total_value;
  result.abs_error = total_error;
  result.panels = queue.size();
  return result;
}

}  // namespace qcr

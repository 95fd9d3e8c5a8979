#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace qcr {

struct QuadratureResult {
  double value = 0.0;      // integral estimate
  double abs_error = 0.0;  // estimated absolute error
  std::size_t panels = 0;  // panels in the final subdivision
};

struct QuadratureOptions {
  double rel_tol = 1e-9;        // target |error| <= rel_tol * |value| ...
  double abs_tol = 0.0;         // ... or <= abs_tol, whichever is larger
  std::size_t max_panels = 4000; // subdivision budget
};

// Globally adaptive Gauss-Kronrod 7/15 integration of f over the interval
// spanned by `breakpoints` (sorted internally; duplicates ignored). Interior
// breakpoints seed the initial panel edges, so known kinks or near-singular
// points of the integrand should be listed to keep them on panel boundaries.
// The panel with the largest error estimate is bisected until the tolerance
// or the panel budget is reached. Never throws on its own: the achieved error
// is reported and the caller decides whether it suffices.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::vector<double> breakpoints,
                                    const QuadratureOptions& options = {});

}  // namespace qcr

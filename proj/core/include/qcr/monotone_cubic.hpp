#pragma once

#include <vector>

namespace qcr {

// Monotonicity-preserving piecewise-cubic Hermite interpolant (the classic
// Fritsch-Carlson construction): interpolates the nodes exactly, is C^1, and
// never overshoots between nodes, so monotone data yields a monotone curve.
// Evaluation outside the node range throws RangeError — this interpolant is
// used where extrapolation would be physically meaningless.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  // x strictly increasing, sizes equal, at least 2 nodes.
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;

  double min_x() const { return x_.front(); }
  double max_x() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slope_;  // first derivative at each node
};

}  // namespace qcr

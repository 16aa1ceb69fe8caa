#pragma once

#include <cstddef>
#include <functional>

namespace hrcp {

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct BrentOptions {
  double abs_tol = 1e-8;  ///< final bracket width in x
  std::size_t max_iter = 200;
};

/// Maximize `f` on [lo, hi] with Brent's method (golden section with
/// parabolic interpolation). Derivative-free; for unimodal f the returned
/// x lies within `abs_tol` of the maximizer.
ScalarOptimum brent_maximize(const std::function<double(double)>& f, double lo, double hi,
                             const BrentOptions& opts = {});

}  // namespace hrcp

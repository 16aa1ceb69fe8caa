#include "hrcp/optimize.hpp"

#include <cmath>
#include <stdexcept>

namespace hrcp {

ScalarOptimum brent_maximize(const std::function<double(double)>& f, double lo, double hi,
                             const BrentOptions& opts) {
  if (!(lo < hi)) throw std::invalid_argument("brent_maximize: empty interval");
  constexpr double kGolden = 0.3819660112501051;  // (3 - sqrt 5) / 2
  // Minimize g = -f. Final half-bracket is bounded by 2*tol1, so tol1 = w/4
  // leaves a bracket of width at most abs_tol.
  const double tol1 = opts.abs_tol / 4.0;
  const double tol2 = 2.0 * tol1;

  double a = lo;
  double b = hi;
  double x = a + kGolden * (b - a);
  double w = x;
  double v = x;
  double fx = -f(x);
  double fw = fx;
  double fv = fx;
  double d = 0.0;
  double e = 0.0;

  ScalarOptimum out;
  for (std::size_t iter = 1; iter <= opts.max_iter; ++iter) {
    const double xm = 0.5 * (a + b);
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) {
      out = {x, -fx, iter - 1, true};
      return out;
    }
    bool golden = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (xm >= x) ? tol1 : -tol1;
        golden = false;
      }
    }
    if (golden) {
      e = (x >= xm) ? a - x : b - x;
      d = kGolden * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d : x + ((d > 0.0) ? tol1 : -tol1);
    const double fu = -f(u);
    if (fu <= fx) {
      if (u >= x) a = x; else b = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  out = {x, -fx, opts.max_iter, false};
  return out;
}

}  // namespace hrcp

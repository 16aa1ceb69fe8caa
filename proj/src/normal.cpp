#include "hrcp/normal.hpp"

#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace hrcp {

double log_norm_cdf(double z) {
  if (z > 0.0) return std::log1p(-norm_sf(z));
  if (z > -30.0) return std::log(norm_cdf(z));
  // Mills-ratio expansion: Phi(z) = phi(z)/|z| * (1 - 1/z^2 + 3/z^4 - 15/z^6 + ...)
  const double z2 = z * z;
  const double inv = 1.0 / z2;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 8; ++k) {
    term *= -(2.0 * k - 1.0) * inv;
    sum += term;
  }
  return -0.5 * z2 - kLogSqrt2Pi - std::log(-z) + std::log(sum);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_quantile: p must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace hrcp

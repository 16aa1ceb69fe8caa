#include "hrcp/bhr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "hrcp/error.hpp"
#include "hrcp/normal.hpp"

namespace hrcp {

DependenceParam::DependenceParam(double lambda) : lambda_(lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("DependenceParam: lambda must be positive and finite, got " +
                                std::to_string(lambda));
  }
}

double DependenceParam::chi() const { return 2.0 * norm_sf(1.0 / lambda_); }

double DependenceParam::v11() const { return 2.0 * norm_cdf(1.0 / lambda_); }

double chi_of_lambda(DependenceParam lam) { return lam.chi(); }

DependenceParam lambda_of_chi(double chi) {
  if (!(chi > 0.0 && chi < 1.0)) {
    throw std::invalid_argument("lambda_of_chi: chi must lie in (0, 1)");
  }
  return DependenceParam(-1.0 / norm_quantile(0.5 * chi));
}

double bhr_cdf(double x, double y, DependenceParam lam) {
  if (std::isnan(x) || std::isnan(y)) throw std::invalid_argument("bhr_cdf: NaN coordinate");
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (x == -inf || y == -inf) return 0.0;
  if (x == inf && y == inf) return 1.0;
  if (y == inf) return std::exp(-std::exp(-x));
  if (x == inf) return std::exp(-std::exp(-y));
  const double l = lam.lambda();
  const double p = 1.0 / l;
  const double q = 0.5 * l * (y - x);
  const double v = std::exp(-x) * norm_cdf(p + q) + std::exp(-y) * norm_cdf(p - q);
  return std::exp(-v);
}

namespace detail {

double log_pdf_kernel(const PreparedPoint& pt, double lambda) {
  // h = H * (Psi * Psi~ + (Lambda/2) * psi), where psi = e^{-x} phi(a) = e^{-y} phi(b);
  // psi is evaluated in a form symmetric in (x, y).
  const double p = 1.0 / lambda;
  const double q = 0.5 * lambda * pt.d;
  const double a = p + q;
  const double b = p - q;
  const double big_psi = pt.ex * norm_cdf(a);
  const double big_psi_t = pt.ey * norm_cdf(b);
  const double log_psi = -pt.half_s - 0.5 * (p * p + q * q) - kLogSqrt2Pi;
  const double v = big_psi + big_psi_t;
  const double inner = big_psi * big_psi_t + 0.5 * lambda * std::exp(log_psi);
  if (inner > 1e-280 && std::isfinite(inner)) return -v + std::log(inner);

  const double t1 = (std::log(pt.ex) + log_norm_cdf(a)) + (std::log(pt.ey) + log_norm_cdf(b));
  const double t2 = std::log(0.5 * lambda) + log_psi;
  const double hi = std::max(t1, t2);
  const double lo = std::min(t1, t2);
  return -v + hi + std::log1p(std::exp(lo - hi));
}

double log_pdf_sum(std::span<const PreparedPoint> pts, double lambda) {
  double sum = 0.0;
  for (const auto& pt : pts) sum += log_pdf_kernel(pt, lambda);
  return sum;
}

}  // namespace detail

double bhr_log_pdf(GumbelPair p, DependenceParam lam) {
  const double v = detail::log_pdf_kernel(detail::prepare(p), lam.lambda());
  if (!std::isfinite(v)) {
    throw NumericalError("bhr_log_pdf: non-finite log-density at (" + std::to_string(p.x) + ", " +
                         std::to_string(p.y) + "), lambda=" + std::to_string(lam.lambda()));
  }
  return v;
}

double log_conditional_cdf_y_given_x(double y, double x, DependenceParam lam) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (y == inf) return 0.0;
  if (y == -inf) return -inf;
  const double l = lam.lambda();
  const double p = 1.0 / l;
  const double q = 0.5 * l * (y - x);
  const double a = p + q;
  const double b = p - q;
  // log[ H(x,y) * Phi(a) / exp(-e^{-x}) ], with e^{-x}(1 - Phi(a)) kept exact.
  return std::exp(-x) * norm_sf(a) - std::exp(-y) * norm_cdf(b) + log_norm_cdf(a);
}

double conditional_cdf_y_given_x(double y, double x, DependenceParam lam) {
  return std::exp(log_conditional_cdf_y_given_x(y, x, lam));
}

GumbelPair sample_bhr_one(DependenceParam lam, RandomStream& stream) {
  const double x = stream.gumbel();
  const double log_u = std::log(stream.uniform());
  auto g = [&](double y) { return log_conditional_cdf_y_given_x(y, x, lam) - log_u; };

  double lo = -60.0;
  double hi = 60.0;
  double glo = g(lo);
  double ghi = g(hi);
  for (int k = 0; k < 8 && glo > 0.0; ++k) { lo -= 60.0; glo = g(lo); }
  for (int k = 0; k < 8 && ghi < 0.0; ++k) { hi += 60.0; ghi = g(hi); }
  if (glo > 0.0 || ghi < 0.0) throw NumericalError("sample_bhr: failed to bracket conditional quantile");
  if (glo == 0.0) return {x, lo};
  if (ghi == 0.0) return {x, hi};

  std::uintmax_t max_iter = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) < 1e-10; };
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, max_iter);
  if (max_iter >= 200) throw NumericalError("sample_bhr: conditional inversion did not converge");
  return {x, 0.5 * (a + b)};
}

std::vector<GumbelPair> sample_bhr(DependenceParam lam, std::size_t n, RandomStream& stream) {
  if (n == 0) throw std::invalid_argument("sample_bhr: n must be at least 1");
  std::vector<GumbelPair> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_bhr_one(lam, stream));
  return out;
}

}  // namespace hrcp

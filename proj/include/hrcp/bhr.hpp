#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hrcp/random.hpp"

namespace hrcp {

/// Dependence parameter Lambda of the bivariate Husler-Reiss law.
/// Lambda -> 0 is independence, Lambda -> infinity comonotonicity.
class DependenceParam {
 public:
  /// Throws std::invalid_argument unless lambda is positive and finite.
  explicit DependenceParam(double lambda);

  [[nodiscard]] double lambda() const { return lambda_; }
  /// Extremal coefficient chi = 2 * (1 - Phi(1/Lambda)).
  [[nodiscard]] double chi() const;
  /// Exponent measure on the diagonal, V(1,1) = 2 * Phi(1/Lambda).
  [[nodiscard]] double v11() const;

  friend bool operator==(const DependenceParam&, const DependenceParam&) = default;

 private:
  double lambda_;
};

/// Numerical search domain for Lambda used by every optimizer.
inline constexpr double kLambdaMin = 1e-3;
inline constexpr double kLambdaMax = 50.0;

/// A point on standard Gumbel margins.
struct GumbelPair {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const GumbelPair&, const GumbelPair&) = default;
};

/// Joint CDF H_Lambda(x, y). Either coordinate may be +/-infinity.
double bhr_cdf(double x, double y, DependenceParam lam);
inline double bhr_cdf(GumbelPair p, DependenceParam lam) { return bhr_cdf(p.x, p.y, lam); }

/// log h_Lambda(x, y). Throws NumericalError if the result is not finite.
double bhr_log_pdf(GumbelPair p, DependenceParam lam);

double chi_of_lambda(DependenceParam lam);
/// Inverse of chi_of_lambda. Throws std::invalid_argument unless chi is in (0, 1).
DependenceParam lambda_of_chi(double chi);

/// P(Y <= y | X = x): dH/dx divided by the standard Gumbel density at x.
double conditional_cdf_y_given_x(double y, double x, DependenceParam lam);
/// log of conditional_cdf_y_given_x, stable far into either tail.
double log_conditional_cdf_y_given_x(double y, double x, DependenceParam lam);

/// Draw one pair by conditional inversion: X by inverse Gumbel CDF, then
/// Y solving conditional_cdf_y_given_x(Y; X) = U on a bracket.
GumbelPair sample_bhr_one(DependenceParam lam, RandomStream& stream);
/// n i.i.d. draws. Throws std::invalid_argument if n == 0.
std::vector<GumbelPair> sample_bhr(DependenceParam lam, std::size_t n, RandomStream& stream);

namespace detail {

/// Per-point constants for repeated density evaluation at varying Lambda.
struct PreparedPoint {
  double ex;     // exp(-x)
  double ey;     // exp(-y)
  double d;      // y - x
  double half_s; // (x + y) / 2
};

inline PreparedPoint prepare(GumbelPair p) {
  return {std::exp(-p.x), std::exp(-p.y), p.y - p.x, 0.5 * (p.x + p.y)};
}

/// log-density kernel shared by bhr_log_pdf and the likelihood sums.
/// Returns a non-finite value instead of throwing.
double log_pdf_kernel(const PreparedPoint& pt, double lambda);

/// Sum of log_pdf_kernel over a contiguous range; left-to-right.
double log_pdf_sum(std::span<const PreparedPoint> pts, double lambda);

}  // namespace detail

}  // namespace hrcp

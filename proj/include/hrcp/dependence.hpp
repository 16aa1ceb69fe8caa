#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hrcp/random.hpp"
#include "hrcp/series.hpp"

namespace hrcp {

/// Threshold-based empirical chi at level u.
struct ChiEstimate {
  double u = 0.0;
  double chi_hat = 0.0;
  std::size_t n_exceed = 0;   ///< joint exceedances
  std::size_t n_marginal = 0; ///< first-component exceedances (denominator)

  /// chi_hat clamped to [0, 1].
  [[nodiscard]] double reported() const;
  friend bool operator==(const ChiEstimate&, const ChiEstimate&) = default;
};

/// chi_U(u) = #{F_X > u and F_Y > u} / #{F_X > u} with F = rank / (T + 1).
/// Throws InputError if T < 20, u is outside (0, 1), or no marginal
/// exceedance exists.
ChiEstimate empirical_chi_upper(const BivariateSeries& pairs, double u);

/// Mirror image of empirical_chi_upper with "<" comparisons.
ChiEstimate empirical_chi_lower(const BivariateSeries& pairs, double u);

/// F-madogram E|F(Z_{t+h}) - F(Z_t)| / 2 at lag h, F from ranks / (T + 1).
/// Throws InputError if lag == 0 or T <= lag + 10.
double f_madogram(std::span<const double> series, std::size_t lag);

/// Lag-0 cross madogram between the two components, E|F_X(X_t) - F_Y(Y_t)| / 2.
double cross_madogram(const BivariateSeries& pairs);

/// chi = 2 - (1 + 2 nu) / (1 - 2 nu). Throws std::invalid_argument unless
/// 0 <= nu < 0.5.
double chi_from_madogram(double nu);

/// Madogram chi between components.
double madogram_chi(const BivariateSeries& pairs);

/// chi_h from f_madogram for h = 1..max_lag.
std::vector<double> lagged_madogram_chi(std::span<const double> series, std::size_t max_lag);

struct IndependenceTestResult {
  double critical_value = 0.0;
  double observed_chi = 0.0;
  bool reject = false;
  std::size_t replicates = 0;
  friend bool operator==(const IndependenceTestResult&, const IndependenceTestResult&) = default;
};

/// Permutation test of extremal independence between components: the
/// second component is permuted B times (substream b per replicate), the
/// madogram chi recomputed, and the (1 - alpha) quantile used as the
/// critical value. Throws InputError if B < 200.
IndependenceTestResult independence_bootstrap_test(const BivariateSeries& pairs, std::size_t B,
                                                   double alpha, const RandomStream& stream);

}  // namespace hrcp

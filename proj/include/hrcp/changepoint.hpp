#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "hrcp/bhr.hpp"
#include "hrcp/series.hpp"

namespace hrcp {

enum class Method { LRT, MIC };
std::string_view to_string(Method m);
/// Parses "LRT"/"MIC" (case-insensitive); throws InputError otherwise.
Method method_from_string(std::string_view s);

/// A maximized BHR log-likelihood.
struct LikelihoodValue {
  double loglik = 0.0;
  DependenceParam lambda_at_optimum{1.0};
  bool converged = false;
  std::size_t iterations = 0;
  /// Optimum sits on the [kLambdaMin, kLambdaMax] search boundary.
  bool at_boundary = false;
  friend bool operator==(const LikelihoodValue&, const LikelihoodValue&) = default;
};

struct ChangepointResult {
  Method method = Method::LRT;
  /// Z'_T for LRT, S'_T for MIC.
  double statistic = 0.0;
  /// Size of the first segment: observations 1..tau_hat precede the change.
  std::size_t tau_hat = 0;
  DependenceParam lambda_null{1.0};
  DependenceParam lambda_pre{1.0};
  DependenceParam lambda_post{1.0};
  /// Profile values for tau = first_tau, first_tau + 1, ...: LR(tau) for LRT,
  /// MIC(tau) for MIC.
  std::size_t first_tau = 0;
  std::vector<double> profile;
  /// MIC(T) of the no-change model (MIC only).
  double mic_null = 0.0;
  friend bool operator==(const ChangepointResult&, const ChangepointResult&) = default;
};

/// How the per-tau segment MLEs are computed.
enum class ProfileStrategy {
  Incremental,  ///< sequential; grid brackets come from prefix sums shared across tau
  ColdSerial,   ///< serial reference: every fit evaluates its own bracketing grid
  Parallel,    ///< OpenMP over tau, cold fits; identical to ColdSerial
};

/// sum_t log h_Lambda(x_t, y_t). Throws NumericalError naming the index of a
/// non-finite term.
double loglik_h0(const BivariateSeries& data, DependenceParam lam);

/// Bounded maximization of loglik_h0 over log Lambda in
/// [log kLambdaMin, log kLambdaMax]: a 45-point grid brackets the optimum,
/// then Brent refines it to 1e-8 in log Lambda (at most 200 iterations).
/// Throws InputError if fewer than 2 observations.
LikelihoodValue mle_h0(const BivariateSeries& data);

/// sum_{t<=tau} log h_{lam1} + sum_{t>tau} log h_{lamT}. Requires 1 <= tau < T.
double loglik_ha(const BivariateSeries& data, std::size_t tau, DependenceParam lam1,
                 DependenceParam lamT);

/// Separate MLEs of the two segments split after observation tau. Each
/// segment needs at least 2 observations.
std::pair<LikelihoodValue, LikelihoodValue> mle_ha(const BivariateSeries& data, std::size_t tau);

/// tau_0 = 2 * floor(ln T). Requires T >= 2.
std::size_t trim_bound(std::size_t T);

/// Every fit needed by both statistics: the H0 fit and the two segment fits
/// for each tau in the open trimmed range (tau_0, T - tau_0).
struct ChangepointScan {
  std::size_t T = 0;
  std::size_t tau0 = 0;
  LikelihoodValue null_fit;
  std::vector<LikelihoodValue> pre;   ///< index i <-> tau = tau0 + 1 + i
  std::vector<LikelihoodValue> post;

  [[nodiscard]] std::size_t first_tau() const { return tau0 + 1; }
  [[nodiscard]] std::size_t count() const { return pre.size(); }
  [[nodiscard]] bool all_converged() const;
  /// First tau whose fit did not converge, or 0.
  [[nodiscard]] std::size_t first_unconverged_tau() const;
  /// LR(tau); tiny negatives (>= -1e-6) clamp to 0.
  [[nodiscard]] std::vector<double> lr_values() const;
  [[nodiscard]] std::vector<double> mic_values() const;
  [[nodiscard]] double mic_null() const;
};

/// Fits everything over the trimmed range. Throws InputError if the trimmed
/// range is empty; does not throw on non-convergence (see all_converged).
ChangepointScan scan_changepoints(const BivariateSeries& data,
                                  ProfileStrategy strategy = ProfileStrategy::Incremental);

/// LR(tau) over the trimmed range. Throws NumericalError on non-convergence.
std::vector<double> lr_profile(const BivariateSeries& data,
                               ProfileStrategy strategy = ProfileStrategy::Incremental);
/// MIC(tau) = -2 log L_A + (2 + (2 tau / T - 1)^2) ln T over the trimmed range.
std::vector<double> mic_profile(const BivariateSeries& data,
                                ProfileStrategy strategy = ProfileStrategy::Incremental);
/// MIC(T) = -2 log L_0(Lambda-hat) + ln T.
double mic_null(const BivariateSeries& data);

/// Z'_T = max LR(tau), tau-hat = argmax (smallest tau on ties).
ChangepointResult lrt_statistic(const ChangepointScan& scan);
ChangepointResult lrt_statistic(const BivariateSeries& data,
                                ProfileStrategy strategy = ProfileStrategy::Incremental);

/// S'_T = MIC(T) - min MIC(tau) + ln T, tau-hat = argmin MIC(tau).
/// Equivalently S'_T = max [LR(tau) - (2 tau / T - 1)^2 ln T], so S'_T <= Z'_T.
ChangepointResult mic_statistic(const ChangepointScan& scan);
ChangepointResult mic_statistic(const BivariateSeries& data,
                                ProfileStrategy strategy = ProfileStrategy::Incremental);

struct DetectionResult {
  ChangepointResult lrt;
  ChangepointResult mic;
  friend bool operator==(const DetectionResult&, const DetectionResult&) = default;
};
/// One scan, both statistics. Throws NumericalError on non-convergence.
DetectionResult detect_changepoint(const BivariateSeries& data,
                                   ProfileStrategy strategy = ProfileStrategy::Incremental);

}  // namespace hrcp

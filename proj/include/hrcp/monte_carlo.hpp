#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hrcp/bhr.hpp"
#include "hrcp/changepoint.hpp"
#include "hrcp/random.hpp"
#include "hrcp/series.hpp"

namespace hrcp {

struct SimulationConfig {
  std::size_t B = 10000;
  std::uint64_t seed = 20240521;
  std::size_t T = 200;
  DependenceParam lambda1{1.0};  ///< null Lambda for critical values
  DependenceParam lambdaT{1.0};
  double beta = 0.5;             ///< changepoint at floor(beta * T)
  std::vector<double> alphas{0.01, 0.05, 0.1};
  std::vector<std::size_t> deltas{1, 2, 3};
  int workers = 0;               ///< OpenMP threads; 0 keeps the runtime default

  /// Throws InputError on B < 100, beta outside (0, 1), an alpha outside
  /// (0, 1), or a T too short for the trimmed range.
  void validate() const;
  [[nodiscard]] std::size_t tau() const;
};

struct CriticalValue {
  Method method = Method::LRT;
  std::size_t T = 0;
  double lambda = 0.0;
  double alpha = 0.0;
  double cutoff = 0.0;
  double se = 0.0;
  std::size_t B = 0;   ///< statistics actually used (after drops)
  std::uint64_t seed = 0;
  friend bool operator==(const CriticalValue&, const CriticalValue&) = default;
};

class CriticalValueTable {
 public:
  void add(const CriticalValue& cv);
  /// Replaces an entry with the same key, else appends.
  void upsert(const CriticalValue& cv);
  [[nodiscard]] std::optional<CriticalValue> find(Method m, std::size_t T, double lambda,
                                                  double alpha) const;
  /// Like find; throws InputError naming the missing key.
  [[nodiscard]] const CriticalValue& at(Method m, std::size_t T, double lambda, double alpha) const;
  [[nodiscard]] const std::vector<CriticalValue>& entries() const { return entries_; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }

  void write_csv(std::ostream& os) const;
  static CriticalValueTable read_csv(std::istream& is);
  [[nodiscard]] std::string to_json() const;
  static CriticalValueTable from_json(const std::string& text);

  friend bool operator==(const CriticalValueTable&, const CriticalValueTable&) = default;

 private:
  std::vector<CriticalValue> entries_;
};

/// Z'_T and S'_T from replicates b = 0..B-1, index-aligned; replicates whose
/// fits failed are dropped (and counted).
struct NullStatistics {
  std::vector<double> lrt;
  std::vector<double> mic;
  std::size_t requested = 0;
  std::size_t dropped = 0;
};

/// Replicate b draws T pairs at Lambda from stream.substream(b). Throws
/// NumericalError if more than 0.1% of the replicates fail.
NullStatistics simulate_null_statistics(std::size_t T, DependenceParam lam, std::size_t B,
                                        const RandomStream& stream, int workers = 0);

/// Same replicate scheme with a step lambda1 -> lambdaT after observation tau.
NullStatistics simulate_step_statistics(std::size_t T, std::size_t tau, DependenceParam lambda1,
                                        DependenceParam lambdaT, std::size_t B,
                                        const RandomStream& stream, int workers = 0);

/// Upper (1 - alpha) type-7 quantile and its standard error from
/// `resamples` nonparametric bootstrap resamples drawn from `stream`.
std::pair<double, double> cutoff_with_se(const std::vector<double>& stats, double alpha,
                                         std::size_t resamples, RandomStream stream);

inline constexpr std::size_t kCutoffResamples = 500;

/// Cutoffs for both methods at every cfg.alpha, null Lambda = cfg.lambda1.
CriticalValueTable simulate_critical_values(const SimulationConfig& cfg);

struct PowerPoint {
  Method method = Method::LRT;
  double alpha = 0.0;
  double cutoff = 0.0;
  double power = 0.0;
  std::size_t rejections = 0;
  std::size_t used = 0;
};

struct PowerReport {
  std::size_t T = 0;
  std::size_t tau = 0;
  double lambda1 = 0.0;
  double lambdaT = 0.0;
  std::vector<PowerPoint> points;
  std::size_t dropped = 0;
  [[nodiscard]] const PowerPoint& at(Method m, double alpha) const;
};

/// Rejection frequency of statistic >= cutoff for data with a step at
/// floor(beta * T). The table must hold (T, lambda1, alpha) for every alpha.
PowerReport simulate_power(const SimulationConfig& cfg, const CriticalValueTable& table);

struct ConsistencyMethod {
  Method method = Method::LRT;
  std::vector<std::size_t> deltas;
  std::vector<double> inclusion;  ///< P(|tau_hat - tau| <= delta), aligned with deltas
  double bias = 0.0;              ///< mean(tau_hat - tau)
  double mse = 0.0;
  std::size_t used = 0;
};

struct ConsistencyReport {
  std::size_t T = 0;
  std::size_t tau = 0;
  double lambda1 = 0.0;
  double lambdaT = 0.0;
  ConsistencyMethod lrt;
  ConsistencyMethod mic;
  std::size_t dropped = 0;
};

/// Requires lambda1 != lambdaT.
ConsistencyReport simulate_consistency(const SimulationConfig& cfg);

struct BootstrapPValue {
  double p_lrt = 1.0;
  double p_mic = 1.0;
  DetectionResult observed;
  DependenceParam lambda_hat{1.0};
  std::size_t replicates = 0;
  std::size_t dropped = 0;
};

/// Parametric bootstrap under H0 at the fitted Lambda: p = fraction of the
/// null statistics >= the observed one. Throws InputError if B < 200.
BootstrapPValue bootstrap_pvalue(const BivariateSeries& data, std::size_t B,
                                 const RandomStream& stream, int workers = 0);

std::string power_report_csv(const std::vector<PowerReport>& reports);
std::string consistency_report_csv(const std::vector<ConsistencyReport>& reports);
std::string power_report_json(const std::vector<PowerReport>& reports);
std::string consistency_report_json(const std::vector<ConsistencyReport>& reports);

}  // namespace hrcp

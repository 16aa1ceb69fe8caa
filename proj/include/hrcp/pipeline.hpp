#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrcp/changepoint.hpp"
#include "hrcp/dependence.hpp"
#include "hrcp/ingest.hpp"
#include "hrcp/margins.hpp"

namespace hrcp {

enum class Tail { Max, Min };
enum class TailSelection { Max, Min, Both };
std::string_view to_string(Tail t);
std::string_view to_string(TailSelection t);
/// "max" | "min" | "both"; throws InputError otherwise.
TailSelection tail_selection_from_string(std::string_view s);

struct PipelineConfig {
  std::string path_a;
  std::string path_b;
  CsvSchema schema;
  std::size_t window = kDefaultWindow;
  TailSelection tails = TailSelection::Both;
  /// Parametric bootstrap replicates for p-values; 0 skips them.
  std::size_t bootstrap_B = 2000;
  std::uint64_t seed = 20240521;
  /// Level of the cross-component independence check.
  double alpha = 0.05;
  std::size_t independence_B = 500;
  double chi_u = 0.95;
  std::size_t max_lag = 10;
  int workers = 0;

  /// Throws InputError on out-of-range settings.
  void validate() const;
  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

enum class WarningKind { Data, Diagnostic };

struct PipelineWarning {
  WarningKind kind = WarningKind::Data;
  std::string message;
  friend bool operator==(const PipelineWarning&, const PipelineWarning&) = default;
};

struct TailReport {
  Tail tail = Tail::Max;
  MarginProfile margin_a;
  MarginProfile margin_b;
  std::vector<double> z_a;  ///< standard-Gumbel series
  std::vector<double> z_b;
  ChiEstimate chi_upper;
  double madogram_chi = 0.0;
  std::vector<double> lagged_chi_a;  ///< lags 1..max_lag
  std::vector<double> lagged_chi_b;
  IndependenceTestResult independence;
  /// Absent for diagnostics-only runs.
  std::optional<DetectionResult> detection;
  std::optional<double> p_lrt;
  std::optional<double> p_mic;
  std::size_t bootstrap_replicates = 0;
  std::size_t bootstrap_dropped = 0;
  std::string date_lrt;  ///< date of the last pre-change observation
  std::string date_mic;
  friend bool operator==(const TailReport&, const TailReport&) = default;
};

struct PipelineReport {
  PipelineConfig config;
  std::vector<std::string> dates;  ///< aligned return dates
  std::size_t records_a = 0;
  std::size_t records_b = 0;
  std::size_t dropped_a = 0;
  std::size_t dropped_b = 0;
  std::vector<TailReport> tails;
  std::vector<PipelineWarning> warnings;

  [[nodiscard]] bool has_diagnostic_warning() const;
  [[nodiscard]] const TailReport& tail(Tail t) const;
  friend bool operator==(const PipelineReport&, const PipelineReport&) = default;
};

enum class PipelineStage { Transform, Diagnostics, Full };

/// Loads both files, then runs run_pipeline on the records.
PipelineReport run_pipeline(const PipelineConfig& config,
                            PipelineStage stop_after = PipelineStage::Full);

/// ror -> align -> local PWM -> standard Gumbel -> chi diagnostics and
/// independence check -> LRT + MIC -> bootstrap p-values. Each tail runs on
/// its own thread; random streams depend only on (seed, tail). Errors are
/// rethrown with the stage name prefixed, keeping their type.
PipelineReport run_pipeline(const PipelineConfig& config, const LoadResult& a, const LoadResult& b,
                            PipelineStage stop_after = PipelineStage::Full);

/// 1-based tau -> date of observation tau. Throws InputError if out of range.
std::string date_of_tau(const std::vector<std::string>& dates, std::size_t tau);

std::string report_to_json(const PipelineReport& r);
/// Inverse of report_to_json; throws InputError on malformed documents.
PipelineReport report_from_json(const std::string& text);
std::string report_markdown(const PipelineReport& r);
/// tail,method,tau,date,value for LR(tau) and MIC(tau).
std::string profiles_csv(const PipelineReport& r);
/// tail,series,index,date,mu,sigma,z.
std::string margins_csv(const PipelineReport& r);
/// date,tail,z_a,z_b.
std::string standardized_csv(const PipelineReport& r);

}  // namespace hrcp

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hrcp/monte_carlo.hpp"
#include "hrcp/pipeline.hpp"

namespace hrcp::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInputError = 2,
  kNumericalFailure = 3,
  kStrictWarning = 4,
};

struct CriticalsPlan {
  std::vector<std::size_t> T;
  std::vector<double> lambda;
  std::vector<double> alpha{0.01, 0.05, 0.1};
};

struct PowerPlan {
  std::size_t T = 200;
  double beta = 0.5;
  double lambda1 = 0.5;
  std::vector<double> lambdaT;
  std::vector<double> alpha{0.01, 0.05, 0.1};
  std::optional<std::string> table;  ///< CSV of cutoffs; simulated when absent
};

struct ConsistencyPlan {
  std::size_t T = 200;
  std::vector<double> beta{0.5};
  double lambda1 = 0.5;
  std::vector<double> lambdaT;
  std::vector<std::size_t> deltas{1, 2, 3};
};

/// Top-level keys seed, B, workers; sections [criticals], [power], [consistency].
struct SimulationPlan {
  std::uint64_t seed = 20240521;
  std::size_t B = 10000;
  int workers = 0;
  std::optional<CriticalsPlan> criticals;
  std::optional<PowerPlan> power;
  std::optional<ConsistencyPlan> consistency;
};

/// Throws InputError on TOML syntax errors or ill-typed keys.
SimulationPlan load_simulation_plan(const std::string& path);

CriticalValueTable run_criticals(const SimulationPlan& plan, std::ostream& log);
std::vector<PowerReport> run_power(const SimulationPlan& plan, std::ostream& log);
std::vector<ConsistencyReport> run_consistency(const SimulationPlan& plan, std::ostream& log);

/// Writes report.json, summary.md, profiles.csv, margins.csv into dir.
void write_report_files(const PipelineReport& r, const std::string& dir);

int main_entry(int argc, char** argv);

}  // namespace hrcp::cli

#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <toml.hpp>

#include "hrcp/error.hpp"

namespace hrcp::cli {
namespace {

namespace fs = std::filesystem;

template <class T>
std::vector<T> number_list(const toml::node_view<const toml::node>& node, const std::string& key) {
  std::vector<T> out;
  if (!node) return out;
  const auto push = [&](const toml::node& n) {
    if constexpr (std::is_integral_v<T>) {
      auto v = n.value<std::int64_t>();
      if (!v || *v < 0) throw InputError("'" + key + "' must hold non-negative integers");
      out.push_back(static_cast<T>(*v));
    } else {
      auto v = n.value<double>();
      if (!v) throw InputError("'" + key + "' must hold numbers");
      out.push_back(*v);
    }
  };
  if (const auto* arr = node.as_array()) {
    for (const auto& n : *arr) push(n);
  } else {
    push(*node.node());
  }
  return out;
}

template <class T>
T scalar(const toml::node_view<const toml::node>& node, const std::string& key, T fallback) {
  if (!node) return fallback;
  const auto v = number_list<T>(node, key);
  if (v.size() != 1) throw InputError("'" + key + "' must be a single value");
  return v.front();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  if (!out) throw InputError("cannot write " + p.string());
  out << content;
}

fs::path ensure_dir(const std::string& dir) {
  const fs::path p(dir.empty() ? "." : dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw InputError("cannot create " + p.string() + ": " + ec.message());
  return p;
}

SimulationConfig base_config(const SimulationPlan& plan) {
  SimulationConfig c;
  c.B = plan.B;
  c.seed = plan.seed;
  c.workers = plan.workers;
  return c;
}

struct CommonOptions {
  std::size_t window = kDefaultWindow;
  std::size_t bootstrap_B = 2000;
  std::uint64_t seed = 20240521;
  std::string tail = "both";
  double alpha = 0.05;
  std::string out;
  std::string schema;
  bool strict = false;
  int workers = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, std::string& a, std::string& b) {
  cmd->add_option("series_a", a, "OHLC CSV of the first asset")->required();
  cmd->add_option("series_b", b, "OHLC CSV of the second asset")->required();
  cmd->add_option("--window", o.window, "local PWM window size")->capture_default_str();
  cmd->add_option("--bootstrap-b", o.bootstrap_B, "bootstrap replicates for p-values (0 skips)")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "base random seed")->capture_default_str();
  cmd->add_option("--tail", o.tail, "max, min or both")
      ->check(CLI::IsMember({"max", "min", "both"}))
      ->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "level of the independence check")->capture_default_str();
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--schema", o.schema, "TOML column mapping");
  cmd->add_flag("--strict", o.strict, "exit 4 on diagnostic warnings");
  cmd->add_option("--workers", o.workers, "OpenMP threads (0 = default)");
}

PipelineConfig pipeline_config(const CommonOptions& o, const std::string& a, const std::string& b) {
  PipelineConfig c;
  c.path_a = a;
  c.path_b = b;
  if (!o.schema.empty()) c.schema = schema_from_toml(o.schema);
  c.window = o.window;
  c.tails = tail_selection_from_string(o.tail);
  c.bootstrap_B = o.bootstrap_B;
  c.seed = o.seed;
  c.alpha = o.alpha;
  c.workers = o.workers;
  return c;
}

int finish(const PipelineReport& r, bool strict) {
  for (const auto& w : r.warnings) {
    std::cerr << "warning: " << w.message << '\n';
  }
  return strict && r.has_diagnostic_warning() ? kStrictWarning : kOk;
}

}  // namespace

SimulationPlan load_simulation_plan(const std::string& path) {
  toml::table doc;
  try {
    doc = toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << path << ":" << e.source().begin.line << ": " << e.description();
    throw InputError(msg.str());
  }
  const toml::node_view<const toml::node> t{static_cast<const toml::node&>(doc)};
  SimulationPlan plan;
  plan.seed = scalar<std::uint64_t>(t["seed"], "seed", plan.seed);
  plan.B = scalar<std::size_t>(t["B"], "B", plan.B);
  plan.workers = static_cast<int>(scalar<std::size_t>(t["workers"], "workers", 0));
  if (auto s = t["criticals"]) {
    CriticalsPlan c;
    c.T = number_list<std::size_t>(s["T"], "criticals.T");
    c.lambda = number_list<double>(s["lambda"], "criticals.lambda");
    if (s["alpha"]) c.alpha = number_list<double>(s["alpha"], "criticals.alpha");
    if (c.T.empty() || c.lambda.empty()) throw InputError("[criticals] needs T and lambda");
    plan.criticals = c;
  }
  if (auto s = t["power"]) {
    PowerPlan p;
    p.T = scalar<std::size_t>(s["T"], "power.T", p.T);
    p.beta = scalar<double>(s["beta"], "power.beta", p.beta);
    p.lambda1 = scalar<double>(s["lambda1"], "power.lambda1", p.lambda1);
    p.lambdaT = number_list<double>(s["lambdaT"], "power.lambdaT");
    if (s["alpha"]) p.alpha = number_list<double>(s["alpha"], "power.alpha");
    if (auto tb = s["table"].value<std::string>()) p.table = *tb;
    if (p.lambdaT.empty()) throw InputError("[power] needs lambdaT");
    plan.power = p;
  }
  if (auto s = t["consistency"]) {
    ConsistencyPlan c;
    c.T = scalar<std::size_t>(s["T"], "consistency.T", c.T);
    if (s["beta"]) c.beta = number_list<double>(s["beta"], "consistency.beta");
    c.lambda1 = scalar<double>(s["lambda1"], "consistency.lambda1", c.lambda1);
    c.lambdaT = number_list<double>(s["lambdaT"], "consistency.lambdaT");
    if (s["deltas"]) c.deltas = number_list<std::size_t>(s["deltas"], "consistency.deltas");
    if (c.lambdaT.empty()) throw InputError("[consistency] needs lambdaT");
    plan.consistency = c;
  }
  return plan;
}

CriticalValueTable run_criticals(const SimulationPlan& plan, std::ostream& log) {
  if (!plan.criticals) throw InputError("config has no [criticals] section");
  CriticalValueTable table;
  for (std::size_t T : plan.criticals->T) {
    for (double lam : plan.criticals->lambda) {
      SimulationConfig c = base_config(plan);
      c.T = T;
      c.lambda1 = DependenceParam(lam);
      c.alphas = plan.criticals->alpha;
      log << "criticals T=" << T << " lambda=" << lam << " B=" << c.B << '\n';
      const auto part = simulate_critical_values(c);
      for (const auto& e : part.entries()) table.add(e);
    }
  }
  return table;
}

std::vector<PowerReport> run_power(const SimulationPlan& plan, std::ostream& log) {
  if (!plan.power) throw InputError("config has no [power] section");
  const PowerPlan& p = *plan.power;
  SimulationConfig c = base_config(plan);
  c.T = p.T;
  c.beta = p.beta;
  c.lambda1 = DependenceParam(p.lambda1);
  c.alphas = p.alpha;
  CriticalValueTable table;
  if (p.table) {
    std::ifstream in(*p.table);
    if (!in) throw InputError("cannot open " + *p.table);
    table = CriticalValueTable::read_csv(in);
  } else {
    log << "power: simulating cutoffs at T=" << p.T << " lambda=" << p.lambda1 << '\n';
    table = simulate_critical_values(c);
  }
  std::vector<PowerReport> out;
  for (double lt : p.lambdaT) {
    c.lambdaT = DependenceParam(lt);
    log << "power lambdaT=" << lt << '\n';
    out.push_back(simulate_power(c, table));
  }
  return out;
}

std::vector<ConsistencyReport> run_consistency(const SimulationPlan& plan, std::ostream& log) {
  if (!plan.consistency) throw InputError("config has no [consistency] section");
  const ConsistencyPlan& p = *plan.consistency;
  std::vector<ConsistencyReport> out;
  for (double beta : p.beta) {
    for (double lt : p.lambdaT) {
      SimulationConfig c = base_config(plan);
      c.T = p.T;
      c.beta = beta;
      c.lambda1 = DependenceParam(p.lambda1);
      c.lambdaT = DependenceParam(lt);
      c.deltas = p.deltas;
      log << "consistency beta=" << beta << " lambdaT=" << lt << '\n';
      out.push_back(simulate_consistency(c));
    }
  }
  return out;
}

void write_report_files(const PipelineReport& r, const std::string& dir) {
  const fs::path d = ensure_dir(dir);
  write_file(d / "report.json", report_to_json(r));
  write_file(d / "summary.md", report_markdown(r));
  write_file(d / "profiles.csv", profiles_csv(r));
  write_file(d / "margins.csv", margins_csv(r));
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Changepoint detection in bivariate Husler-Reiss extremal dependence"};
  app.require_subcommand(1);

  CommonOptions det_opts;
  std::string det_a, det_b;
  auto* detect = app.add_subcommand("detect", "full pipeline: margins, diagnostics, tests, p-values");
  add_common(detect, det_opts, det_a, det_b);

  CommonOptions tr_opts;
  std::string tr_a, tr_b;
  auto* transform = app.add_subcommand("transform", "emit the standard-Gumbel series as CSV");
  add_common(transform, tr_opts, tr_a, tr_b);

  CommonOptions chi_opts;
  std::string chi_a, chi_b;
  auto* chi = app.add_subcommand("chi", "extremal dependence diagnostics only");
  add_common(chi, chi_opts, chi_a, chi_b);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo tables from a TOML config");
  simulate->require_subcommand(1);
  std::string sim_config;
  std::string sim_out = ".";
  std::optional<std::uint64_t> sim_seed;
  std::optional<std::size_t> sim_B;
  std::optional<int> sim_workers;
  for (const char* kind : {"criticals", "power", "consistency"}) {
    auto* s = simulate->add_subcommand(kind);
    s->add_option("config", sim_config, "TOML configuration")->required()->check(CLI::ExistingFile);
    s->add_option("--out", sim_out, "output directory")->capture_default_str();
    s->add_option("--seed", sim_seed, "override the config seed");
    s->add_option("--bootstrap-b", sim_B, "override the replicate count B");
    s->add_option("--workers", sim_workers, "OpenMP threads (0 = default)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  try {
    if (detect->parsed()) {
      const auto cfg = pipeline_config(det_opts, det_a, det_b);
      const auto rep = run_pipeline(cfg, PipelineStage::Full);
      std::cout << report_markdown(rep);
      if (!det_opts.out.empty()) write_report_files(rep, det_opts.out);
      return finish(rep, det_opts.strict);
    }
    if (transform->parsed()) {
      const auto cfg = pipeline_config(tr_opts, tr_a, tr_b);
      const auto rep = run_pipeline(cfg, PipelineStage::Transform);
      if (tr_opts.out.empty()) {
        std::cout << standardized_csv(rep);
      } else {
        const fs::path d = ensure_dir(tr_opts.out);
        write_file(d / "standardized.csv", standardized_csv(rep));
        write_file(d / "margins.csv", margins_csv(rep));
      }
      return finish(rep, tr_opts.strict);
    }
    if (chi->parsed()) {
      const auto cfg = pipeline_config(chi_opts, chi_a, chi_b);
      const auto rep = run_pipeline(cfg, PipelineStage::Diagnostics);
      std::cout << report_markdown(rep);
      if (!chi_opts.out.empty()) {
        const fs::path d = ensure_dir(chi_opts.out);
        write_file(d / "report.json", report_to_json(rep));
      }
      return finish(rep, chi_opts.strict);
    }
    if (simulate->parsed()) {
      SimulationPlan plan = load_simulation_plan(sim_config);
      if (sim_seed) plan.seed = *sim_seed;
      if (sim_B) plan.B = *sim_B;
      if (sim_workers) plan.workers = *sim_workers;
      const fs::path d = ensure_dir(sim_out);
      const std::string kind = simulate->get_subcommands().front()->get_name();
      if (kind == "criticals") {
        const auto table = run_criticals(plan, std::cerr);
        std::ostringstream csv;
        table.write_csv(csv);
        write_file(d / "criticals.csv", csv.str());
        write_file(d / "criticals.json", table.to_json());
        std::cout << csv.str();
      } else if (kind == "power") {
        const auto reps = run_power(plan, std::cerr);
        write_file(d / "power.csv", power_report_csv(reps));
        write_file(d / "power.json", power_report_json(reps));
        std::cout << power_report_csv(reps);
      } else {
        const auto reps = run_consistency(plan, std::cerr);
        write_file(d / "consistency.csv", consistency_report_csv(reps));
        write_file(d / "consistency.json", consistency_report_json(reps));
        std::cout << consistency_report_csv(reps);
      }
      return kOk;
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

}  // namespace hrcp::cli

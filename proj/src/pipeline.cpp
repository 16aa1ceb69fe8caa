#include "hrcp/pipeline.hpp"

#include <cmath>
#include <future>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hrcp/error.hpp"
#include "hrcp/monte_carlo.hpp"
#include "hrcp/random.hpp"

namespace hrcp {
namespace {

using nlohmann::json;

template <class F>
auto in_stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InputError& e) {
    throw InputError(name + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(name + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(name + ": " + e.what());
  }
}

std::uint64_t tail_stream_id(Tail t) { return t == Tail::Max ? 1 : 2; }

struct TailOutcome {
  TailReport report;
  std::vector<PipelineWarning> warnings;
};

TailOutcome process_tail(const PipelineConfig& cfg, Tail tail, const std::vector<double>& xs,
                         const std::vector<double>& ys, const std::vector<std::string>& dates,
                         PipelineStage stop) {
  TailOutcome out;
  TailReport& r = out.report;
  r.tail = tail;
  const std::string tn(to_string(tail));
  const RandomStream root = RandomStream(cfg.seed).substream(tail_stream_id(tail));

  r.margin_a = in_stage("margins " + tn + " A", [&] { return local_pwm_fit(xs, cfg.window); });
  r.margin_b = in_stage("margins " + tn + " B", [&] { return local_pwm_fit(ys, cfg.window); });
  r.z_a = to_standard_gumbel(xs, r.margin_a);
  r.z_b = to_standard_gumbel(ys, r.margin_b);
  if (stop == PipelineStage::Transform) return out;

  const BivariateSeries pairs = in_stage("standardize " + tn, [&] { return BivariateSeries(r.z_a, r.z_b); });
  in_stage("diagnostics " + tn, [&] {
    r.chi_upper = empirical_chi_upper(pairs, cfg.chi_u);
    r.madogram_chi = madogram_chi(pairs);
    r.lagged_chi_a = lagged_madogram_chi(r.z_a, cfg.max_lag);
    r.lagged_chi_b = lagged_madogram_chi(r.z_b, cfg.max_lag);
    r.independence =
        independence_bootstrap_test(pairs, cfg.independence_B, cfg.alpha, root.substream(1));
    return 0;
  });
  if (!r.independence.reject) {
    std::ostringstream msg;
    msg << tn << " tail: extremal independence not rejected (madogram chi "
        << r.independence.observed_chi << " <= critical " << r.independence.critical_value
        << "); changepoint results are not meaningful";
    out.warnings.push_back({WarningKind::Diagnostic, msg.str()});
  }
  if (stop == PipelineStage::Diagnostics) return out;

  if (cfg.bootstrap_B > 0) {
    const auto bp = in_stage("bootstrap " + tn, [&] {
      return bootstrap_pvalue(pairs, cfg.bootstrap_B, root.substream(2), cfg.workers);
    });
    r.detection = bp.observed;
    r.p_lrt = bp.p_lrt;
    r.p_mic = bp.p_mic;
    r.bootstrap_replicates = bp.replicates;
    r.bootstrap_dropped = bp.dropped;
  } else {
    r.detection = in_stage("detect " + tn, [&] { return detect_changepoint(pairs); });
  }
  const auto& det = *r.detection;
  r.date_lrt = date_of_tau(dates, det.lrt.tau_hat);
  r.date_mic = date_of_tau(dates, det.mic.tau_hat);
  for (const auto* res : {&det.lrt, &det.mic}) {
    for (double lam : {res->lambda_null.lambda(), res->lambda_pre.lambda(), res->lambda_post.lambda()}) {
      if (lam >= kLambdaMax * (1 - 1e-6) || lam <= kLambdaMin * (1 + 1e-6)) {
        out.warnings.push_back({WarningKind::Diagnostic,
                                tn + " tail " + std::string(to_string(res->method)) +
                                    ": a Lambda estimate sits on the search boundary"});
        break;
      }
    }
  }
  return out;
}

// JSON helpers.

json margins_json(const MarginProfile& p) {
  json mu = json::array();
  json sigma = json::array();
  for (const auto& m : p.margins) {
    mu.push_back(m.mu);
    sigma.push_back(m.sigma);
  }
  return {{"window", p.window}, {"mu", mu}, {"sigma", sigma}};
}

MarginProfile margins_from(const json& j) {
  MarginProfile p;
  p.window = j.at("window").get<std::size_t>();
  const auto mu = j.at("mu").get<std::vector<double>>();
  const auto sigma = j.at("sigma").get<std::vector<double>>();
  if (mu.size() != sigma.size()) throw InputError("margin arrays differ in length");
  for (std::size_t i = 0; i < mu.size(); ++i) p.margins.push_back({mu[i], sigma[i]});
  return p;
}

json result_json(const ChangepointResult& c) {
  return {{"method", std::string(to_string(c.method))},
          {"statistic", c.statistic},
          {"tau_hat", c.tau_hat},
          {"lambda_null", c.lambda_null.lambda()},
          {"lambda_pre", c.lambda_pre.lambda()},
          {"lambda_post", c.lambda_post.lambda()},
          {"first_tau", c.first_tau},
          {"profile", c.profile},
          {"mic_null", c.mic_null}};
}

ChangepointResult result_from(const json& j) {
  ChangepointResult c;
  c.method = method_from_string(j.at("method").get<std::string>());
  c.statistic = j.at("statistic").get<double>();
  c.tau_hat = j.at("tau_hat").get<std::size_t>();
  c.lambda_null = DependenceParam(j.at("lambda_null").get<double>());
  c.lambda_pre = DependenceParam(j.at("lambda_pre").get<double>());
  c.lambda_post = DependenceParam(j.at("lambda_post").get<double>());
  c.first_tau = j.at("first_tau").get<std::size_t>();
  c.profile = j.at("profile").get<std::vector<double>>();
  c.mic_null = j.at("mic_null").get<double>();
  return c;
}

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> opt_double(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json tail_json(const TailReport& t) {
  json j{{"tail", std::string(to_string(t.tail))},
         {"margin_a", margins_json(t.margin_a)},
         {"margin_b", margins_json(t.margin_b)},
         {"z_a", t.z_a},
         {"z_b", t.z_b},
         {"chi_upper",
          {{"u", t.chi_upper.u},
           {"chi_hat", t.chi_upper.chi_hat},
           {"n_exceed", t.chi_upper.n_exceed},
           {"n_marginal", t.chi_upper.n_marginal}}},
         {"madogram_chi", t.madogram_chi},
         {"lagged_chi_a", t.lagged_chi_a},
         {"lagged_chi_b", t.lagged_chi_b},
         {"independence",
          {{"critical_value", t.independence.critical_value},
           {"observed_chi", t.independence.observed_chi},
           {"reject", t.independence.reject},
           {"replicates", t.independence.replicates}}},
         {"p_lrt", opt_json(t.p_lrt)},
         {"p_mic", opt_json(t.p_mic)},
         {"bootstrap_replicates", t.bootstrap_replicates},
         {"bootstrap_dropped", t.bootstrap_dropped},
         {"date_lrt", t.date_lrt},
         {"date_mic", t.date_mic}};
  if (t.detection) {
    j["detection"] = {{"lrt", result_json(t.detection->lrt)}, {"mic", result_json(t.detection->mic)}};
  } else {
    j["detection"] = nullptr;
  }
  return j;
}

TailReport tail_from(const json& j) {
  TailReport t;
  const auto name = j.at("tail").get<std::string>();
  if (name == "max") {
    t.tail = Tail::Max;
  } else if (name == "min") {
    t.tail = Tail::Min;
  } else {
    throw InputError("unknown tail '" + name + "'");
  }
  t.margin_a = margins_from(j.at("margin_a"));
  t.margin_b = margins_from(j.at("margin_b"));
  t.z_a = j.at("z_a").get<std::vector<double>>();
  t.z_b = j.at("z_b").get<std::vector<double>>();
  const auto& c = j.at("chi_upper");
  t.chi_upper = {c.at("u").get<double>(), c.at("chi_hat").get<double>(),
                 c.at("n_exceed").get<std::size_t>(), c.at("n_marginal").get<std::size_t>()};
  t.madogram_chi = j.at("madogram_chi").get<double>();
  t.lagged_chi_a = j.at("lagged_chi_a").get<std::vector<double>>();
  t.lagged_chi_b = j.at("lagged_chi_b").get<std::vector<double>>();
  const auto& ind = j.at("independence");
  t.independence = {ind.at("critical_value").get<double>(), ind.at("observed_chi").get<double>(),
                    ind.at("reject").get<bool>(), ind.at("replicates").get<std::size_t>()};
  if (!j.at("detection").is_null()) {
    t.detection = DetectionResult{result_from(j.at("detection").at("lrt")),
                                  result_from(j.at("detection").at("mic"))};
  }
  t.p_lrt = opt_double(j.at("p_lrt"));
  t.p_mic = opt_double(j.at("p_mic"));
  t.bootstrap_replicates = j.at("bootstrap_replicates").get<std::size_t>();
  t.bootstrap_dropped = j.at("bootstrap_dropped").get<std::size_t>();
  t.date_lrt = j.at("date_lrt").get<std::string>();
  t.date_mic = j.at("date_mic").get<std::string>();
  return t;
}

std::string char_str(char c) { return c == '\0' ? std::string() : std::string(1, c); }

json config_json(const PipelineConfig& c) {
  return {{"path_a", c.path_a},
          {"path_b", c.path_b},
          {"schema",
           {{"date", c.schema.date},
            {"close", c.schema.close},
            {"open", c.schema.open},
            {"high", c.schema.high},
            {"low", c.schema.low},
            {"delimiter", char_str(c.schema.delimiter)},
            {"thousands", char_str(c.schema.thousands)},
            {"date_order", c.schema.date_order == DateOrder::MonthFirst ? "month-first" : "day-first"}}},
          {"window", c.window},
          {"tails", std::string(to_string(c.tails))},
          {"bootstrap_B", c.bootstrap_B},
          {"seed", c.seed},
          {"alpha", c.alpha},
          {"independence_B", c.independence_B},
          {"chi_u", c.chi_u},
          {"max_lag", c.max_lag},
          {"workers", c.workers}};
}

char char_from(const json& j) {
  const auto s = j.get<std::string>();
  return s.empty() ? '\0' : s[0];
}

PipelineConfig config_from(const json& j) {
  PipelineConfig c;
  c.path_a = j.at("path_a").get<std::string>();
  c.path_b = j.at("path_b").get<std::string>();
  const auto& s = j.at("schema");
  c.schema.date = s.at("date").get<std::string>();
  c.schema.close = s.at("close").get<std::string>();
  c.schema.open = s.at("open").get<std::string>();
  c.schema.high = s.at("high").get<std::string>();
  c.schema.low = s.at("low").get<std::string>();
  c.schema.delimiter = char_from(s.at("delimiter"));
  c.schema.thousands = char_from(s.at("thousands"));
  c.schema.date_order =
      s.at("date_order").get<std::string>() == "day-first" ? DateOrder::DayFirst : DateOrder::MonthFirst;
  c.window = j.at("window").get<std::size_t>();
  c.tails = tail_selection_from_string(j.at("tails").get<std::string>());
  c.bootstrap_B = j.at("bootstrap_B").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.alpha = j.at("alpha").get<double>();
  c.independence_B = j.at("independence_B").get<std::size_t>();
  c.chi_u = j.at("chi_u").get<double>();
  c.max_lag = j.at("max_lag").get<std::size_t>();
  c.workers = j.at("workers").get<int>();
  return c;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

std::string_view to_string(Tail t) { return t == Tail::Max ? "max" : "min"; }

std::string_view to_string(TailSelection t) {
  switch (t) {
    case TailSelection::Max: return "max";
    case TailSelection::Min: return "min";
    case TailSelection::Both: return "both";
  }
  return "both";
}

TailSelection tail_selection_from_string(std::string_view s) {
  if (s == "max") return TailSelection::Max;
  if (s == "min") return TailSelection::Min;
  if (s == "both") return TailSelection::Both;
  throw InputError("tail must be max, min or both (got '" + std::string(s) + "')");
}

void PipelineConfig::validate() const {
  if (window < 5) throw InputError("window must be at least 5");
  if (bootstrap_B != 0 && bootstrap_B < 200) throw InputError("bootstrap B must be 0 or at least 200");
  if (independence_B < 200) throw InputError("independence B must be at least 200");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (!(chi_u > 0.0 && chi_u < 1.0)) throw InputError("chi threshold must lie in (0, 1)");
  if (max_lag == 0) throw InputError("max lag must be positive");
}

bool PipelineReport::has_diagnostic_warning() const {
  for (const auto& w : warnings) {
    if (w.kind == WarningKind::Diagnostic) return true;
  }
  return false;
}

const TailReport& PipelineReport::tail(Tail t) const {
  for (const auto& r : tails) {
    if (r.tail == t) return r;
  }
  throw InputError("report has no " + std::string(to_string(t)) + " tail");
}

std::string date_of_tau(const std::vector<std::string>& dates, std::size_t tau) {
  if (tau < 1 || tau > dates.size()) {
    throw InputError("tau " + std::to_string(tau) + " outside the aligned series");
  }
  return dates[tau - 1];
}

PipelineReport run_pipeline(const PipelineConfig& config, PipelineStage stop_after) {
  config.validate();
  const auto a = in_stage("load A", [&] { return load_ohlc_csv(config.path_a, config.schema); });
  const auto b = in_stage("load B", [&] { return load_ohlc_csv(config.path_b, config.schema); });
  return run_pipeline(config, a, b, stop_after);
}

PipelineReport run_pipeline(const PipelineConfig& config, const LoadResult& a, const LoadResult& b,
                            PipelineStage stop_after) {
  config.validate();
  PipelineReport rep;
  rep.config = config;
  rep.records_a = a.records.size();
  rep.records_b = b.records.size();
  for (const auto& w : a.warnings) rep.warnings.push_back({WarningKind::Data, w});
  for (const auto& w : b.warnings) rep.warnings.push_back({WarningKind::Data, w});

  const auto ra = in_stage("returns A", [&] { return compute_ror(a.records); });
  const auto rb = in_stage("returns B", [&] { return compute_ror(b.records); });
  const auto aligned = in_stage("align", [&] { return align_pair(ra, rb); });
  rep.dropped_a = aligned.dropped_a;
  rep.dropped_b = aligned.dropped_b;
  if (aligned.dropped_a + aligned.dropped_b > 0) {
    rep.warnings.push_back({WarningKind::Data, "alignment dropped " + std::to_string(aligned.dropped_a) +
                                                   " day(s) of A and " + std::to_string(aligned.dropped_b) +
                                                   " day(s) of B"});
  }
  for (const auto& d : aligned.dates) rep.dates.push_back(format_date(d));

  std::vector<Tail> tails;
  if (config.tails != TailSelection::Min) tails.push_back(Tail::Max);
  if (config.tails != TailSelection::Max) tails.push_back(Tail::Min);

  std::vector<std::future<TailOutcome>> jobs;
  for (Tail t : tails) {
    const auto& xs = t == Tail::Max ? aligned.a_max : aligned.a_min;
    const auto& ys = t == Tail::Max ? aligned.b_max : aligned.b_min;
    jobs.push_back(std::async(std::launch::async, process_tail, std::cref(config), t, std::cref(xs),
                              std::cref(ys), std::cref(rep.dates), stop_after));
  }
  // Collect every job before rethrowing so no thread outlives `aligned`.
  std::exception_ptr first_error;
  for (auto& j : jobs) {
    try {
      auto o = j.get();
      rep.tails.push_back(std::move(o.report));
      rep.warnings.insert(rep.warnings.end(), o.warnings.begin(), o.warnings.end());
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return rep;
}

std::string report_to_json(const PipelineReport& r) {
  json tails = json::array();
  for (const auto& t : r.tails) tails.push_back(tail_json(t));
  json warnings = json::array();
  for (const auto& w : r.warnings) {
    warnings.push_back({{"kind", w.kind == WarningKind::Data ? "data" : "diagnostic"},
                        {"message", w.message}});
  }
  return json{{"config", config_json(r.config)},
              {"dates", r.dates},
              {"records_a", r.records_a},
              {"records_b", r.records_b},
              {"dropped_a", r.dropped_a},
              {"dropped_b", r.dropped_b},
              {"tails", tails},
              {"warnings", warnings}}
      .dump(2);
}

PipelineReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    PipelineReport r;
    r.config = config_from(j.at("config"));
    r.dates = j.at("dates").get<std::vector<std::string>>();
    r.records_a = j.at("records_a").get<std::size_t>();
    r.records_b = j.at("records_b").get<std::size_t>();
    r.dropped_a = j.at("dropped_a").get<std::size_t>();
    r.dropped_b = j.at("dropped_b").get<std::size_t>();
    for (const auto& t : j.at("tails")) r.tails.push_back(tail_from(t));
    for (const auto& w : j.at("warnings")) {
      r.warnings.push_back({w.at("kind").get<std::string>() == "data" ? WarningKind::Data
                                                                      : WarningKind::Diagnostic,
                            w.at("message").get<std::string>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("report JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("report JSON: ") + e.what());
  }
}

std::string report_markdown(const PipelineReport& r) {
  std::ostringstream md;
  md << "# Changepoint report\n\n";
  md << "- series A: `" << r.config.path_a << "` (" << r.records_a << " records)\n";
  md << "- series B: `" << r.config.path_b << "` (" << r.records_b << " records)\n";
  if (!r.dates.empty()) {
    md << "- aligned returns: " << r.dates.size() << " days, " << r.dates.front() << " to "
       << r.dates.back() << " (dropped " << r.dropped_a << " / " << r.dropped_b << ")\n";
  }
  md << "- window " << r.config.window << ", seed " << r.config.seed << ", bootstrap B "
     << r.config.bootstrap_B << "\n\n";

  for (const auto& t : r.tails) {
    md << "## " << to_string(t.tail) << " tail\n\n";
    md << "Diagnostics: chi-hat(" << t.chi_upper.u << ") = " << fixed(t.chi_upper.reported(), 3)
       << ", madogram chi = " << fixed(t.madogram_chi, 3) << ", independence "
       << (t.independence.reject ? "rejected" : "not rejected") << " (critical "
       << fixed(t.independence.critical_value, 3) << ")\n\n";
    if (!t.detection) continue;
    md << "| method | statistic | tau-hat | date | Lambda H0 | Lambda pre | Lambda post | p-value |\n";
    md << "|---|---|---|---|---|---|---|---|\n";
    for (const auto* c : {&t.detection->lrt, &t.detection->mic}) {
      const auto& p = c->method == Method::LRT ? t.p_lrt : t.p_mic;
      md << "| " << to_string(c->method) << " | " << fixed(c->statistic, 3) << " | " << c->tau_hat
         << " | " << (c->method == Method::LRT ? t.date_lrt : t.date_mic) << " | "
         << fixed(c->lambda_null.lambda(), 3) << " | " << fixed(c->lambda_pre.lambda(), 3) << " | "
         << fixed(c->lambda_post.lambda(), 3) << " | " << (p ? fixed(*p, 4) : std::string("-"))
         << " |\n";
    }
    md << "\n";
  }
  if (!r.warnings.empty()) {
    md << "## Warnings\n\n";
    for (const auto& w : r.warnings) {
      md << "- " << (w.kind == WarningKind::Data ? "data" : "diagnostic") << ": " << w.message << "\n";
    }
  }
  return md.str();
}

std::string profiles_csv(const PipelineReport& r) {
  std::ostringstream os;
  os << "tail,method,tau,date,value\n";
  os << std::setprecision(17);
  for (const auto& t : r.tails) {
    if (!t.detection) continue;
    for (const auto* c : {&t.detection->lrt, &t.detection->mic}) {
      for (std::size_t i = 0; i < c->profile.size(); ++i) {
        const std::size_t tau = c->first_tau + i;
        os << to_string(t.tail) << ',' << to_string(c->method) << ',' << tau << ','
           << date_of_tau(r.dates, tau) << ',' << c->profile[i] << '\n';
      }
    }
  }
  return os.str();
}

std::string margins_csv(const PipelineReport& r) {
  std::ostringstream os;
  os << "tail,series,index,date,mu,sigma,z\n";
  os << std::setprecision(17);
  for (const auto& t : r.tails) {
    for (int s = 0; s < 2; ++s) {
      const auto& m = s == 0 ? t.margin_a : t.margin_b;
      const auto& z = s == 0 ? t.z_a : t.z_b;
      for (std::size_t i = 0; i < m.margins.size(); ++i) {
        os << to_string(t.tail) << ',' << (s == 0 ? 'A' : 'B') << ',' << i + 1 << ',' << r.dates[i]
           << ',' << m.margins[i].mu << ',' << m.margins[i].sigma << ',' << z[i] << '\n';
      }
    }
  }
  return os.str();
}

std::string standardized_csv(const PipelineReport& r) {
  std::ostringstream os;
  os << "date,tail,z_a,z_b\n";
  os << std::setprecision(17);
  for (const auto& t : r.tails) {
    for (std::size_t i = 0; i < t.z_a.size(); ++i) {
      os << r.dates[i] << ',' << to_string(t.tail) << ',' << t.z_a[i] << ',' << t.z_b[i] << '\n';
    }
  }
  return os.str();
}

}  // namespace hrcp

#include "hrcp/monte_carlo.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <exception>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hrcp/error.hpp"
#include "hrcp/stats.hpp"

namespace hrcp {
namespace {

using nlohmann::json;

// Stream purposes, mixed into the path so different simulations never
// share replicate streams.
enum : std::uint64_t {
  kNullTag = 0x6e756c6c,
  kCutoffSeTag = 0x73657365,
  kPowerTag = 0x706f7772,
  kConsistencyTag = 0x636f6e73,
};

constexpr double kMaxDropFraction = 1e-3;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  return h;
}

RandomStream cell_stream(std::uint64_t seed, std::uint64_t tag, std::size_t T, double lam1,
                         double lam2 = 0.0, std::size_t tau = 0) {
  std::uint64_t id = mix(tag, T);
  id = mix(id, std::bit_cast<std::uint64_t>(lam1));
  id = mix(id, std::bit_cast<std::uint64_t>(lam2));
  id = mix(id, tau);
  return RandomStream(seed).substream(id);
}

int thread_count(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

bool same_lambda(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct ReplicateOutcome {
  double lrt = 0.0;
  double mic = 0.0;
  std::size_t tau_lrt = 0;
  std::size_t tau_mic = 0;
  bool ok = false;
};

template <class MakeData>
std::vector<ReplicateOutcome> run_replicates(std::size_t B, const RandomStream& stream,
                                             int workers, MakeData make_data) {
  std::vector<ReplicateOutcome> out(B);
  std::exception_ptr fatal;
  const auto n = static_cast<std::int64_t>(B);
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_count(workers))
  for (std::int64_t b = 0; b < n; ++b) {
    RandomStream rs = stream.substream(static_cast<std::uint64_t>(b));
    try {
      const BivariateSeries data = make_data(rs);
      const DetectionResult r = detect_changepoint(data);
      out[b] = {r.lrt.statistic, r.mic.statistic, r.lrt.tau_hat, r.mic.tau_hat, true};
    } catch (const NumericalError&) {
      out[b].ok = false;
    } catch (...) {
#pragma omp critical(hrcp_mc_fatal)
      if (!fatal) fatal = std::current_exception();
    }
  }
  if (fatal) std::rethrow_exception(fatal);

  const auto dropped =
      static_cast<std::size_t>(std::count_if(out.begin(), out.end(), [](auto& o) { return !o.ok; }));
  if (static_cast<double>(dropped) > kMaxDropFraction * static_cast<double>(B)) {
    throw NumericalError(std::to_string(dropped) + " of " + std::to_string(B) +
                         " replicates failed to converge (limit 0.1%)");
  }
  return out;
}

NullStatistics collect(const std::vector<ReplicateOutcome>& out) {
  NullStatistics s;
  s.requested = out.size();
  for (const auto& o : out) {
    if (!o.ok) {
      ++s.dropped;
      continue;
    }
    s.lrt.push_back(o.lrt);
    s.mic.push_back(o.mic);
  }
  return s;
}

auto step_sampler(std::size_t T, std::size_t tau, DependenceParam l1, DependenceParam lT) {
  return [=](RandomStream& rs) {
    std::vector<GumbelPair> pts;
    pts.reserve(T);
    for (std::size_t t = 0; t < T; ++t) pts.push_back(sample_bhr_one(t < tau ? l1 : lT, rs));
    return BivariateSeries(std::move(pts));
  };
}

json entry_json(const CriticalValue& cv) {
  return {{"method", std::string(to_string(cv.method))},
          {"T", cv.T},
          {"lambda", cv.lambda},
          {"alpha", cv.alpha},
          {"cutoff", cv.cutoff},
          {"se", cv.se},
          {"B", cv.B},
          {"seed", cv.seed}};
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

template <class T>
T parse_number(const std::string& s, std::size_t line) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InputError("critical value table line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

void SimulationConfig::validate() const {
  if (B < 100) throw InputError("B must be at least 100");
  if (!(beta > 0.0 && beta < 1.0)) throw InputError("beta must lie in (0, 1)");
  if (alphas.empty()) throw InputError("at least one alpha is required");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw InputError("alpha must lie in (0, 1)");
  }
  if (T < 2 || T < 2 * trim_bound(T) + 2) {
    throw InputError("T = " + std::to_string(T) + " leaves an empty trimmed range");
  }
}

std::size_t SimulationConfig::tau() const {
  return static_cast<std::size_t>(std::floor(beta * static_cast<double>(T)));
}

void CriticalValueTable::add(const CriticalValue& cv) {
  if (find(cv.method, cv.T, cv.lambda, cv.alpha)) {
    throw InputError("duplicate critical value for " + std::string(to_string(cv.method)) +
                     " T=" + std::to_string(cv.T) + " lambda=" + fmt(cv.lambda) +
                     " alpha=" + fmt(cv.alpha));
  }
  entries_.push_back(cv);
}

void CriticalValueTable::upsert(const CriticalValue& cv) {
  for (auto& e : entries_) {
    if (e.method == cv.method && e.T == cv.T && same_lambda(e.lambda, cv.lambda) &&
        same_lambda(e.alpha, cv.alpha)) {
      e = cv;
      return;
    }
  }
  entries_.push_back(cv);
}

std::optional<CriticalValue> CriticalValueTable::find(Method m, std::size_t T, double lambda,
                                                      double alpha) const {
  for (const auto& e : entries_) {
    if (e.method == m && e.T == T && same_lambda(e.lambda, lambda) && same_lambda(e.alpha, alpha)) {
      return e;
    }
  }
  return std::nullopt;
}

const CriticalValue& CriticalValueTable::at(Method m, std::size_t T, double lambda,
                                            double alpha) const {
  for (const auto& e : entries_) {
    if (e.method == m && e.T == T && same_lambda(e.lambda, lambda) && same_lambda(e.alpha, alpha)) {
      return e;
    }
  }
  throw InputError("no critical value for " + std::string(to_string(m)) + " T=" +
                   std::to_string(T) + " lambda=" + fmt(lambda) + " alpha=" + fmt(alpha));
}

void CriticalValueTable::write_csv(std::ostream& os) const {
  os << "method,T,lambda,alpha,cutoff,se,B,seed\n";
  for (const auto& e : entries_) {
    os << to_string(e.method) << ',' << e.T << ',' << fmt(e.lambda) << ',' << fmt(e.alpha) << ','
       << fmt(e.cutoff) << ',' << fmt(e.se) << ',' << e.B << ',' << e.seed << '\n';
  }
}

CriticalValueTable CriticalValueTable::read_csv(std::istream& is) {
  CriticalValueTable table;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line)) throw InputError("critical value table is empty");
  ++lineno;
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected{"method", "T", "lambda", "alpha",
                                          "cutoff", "se", "B", "seed"};
  if (header != expected) throw InputError("critical value table: unexpected header");
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto c = split_csv_line(line);
    if (c.size() != 8) {
      throw InputError("critical value table line " + std::to_string(lineno) + ": expected 8 fields");
    }
    CriticalValue cv;
    cv.method = method_from_string(c[0]);
    cv.T = parse_number<std::size_t>(c[1], lineno);
    cv.lambda = parse_number<double>(c[2], lineno);
    cv.alpha = parse_number<double>(c[3], lineno);
    cv.cutoff = parse_number<double>(c[4], lineno);
    cv.se = parse_number<double>(c[5], lineno);
    cv.B = parse_number<std::size_t>(c[6], lineno);
    cv.seed = parse_number<std::uint64_t>(c[7], lineno);
    table.add(cv);
  }
  return table;
}

std::string CriticalValueTable::to_json() const {
  json arr = json::array();
  for (const auto& e : entries_) arr.push_back(entry_json(e));
  return json{{"critical_values", arr}}.dump(2);
}

CriticalValueTable CriticalValueTable::from_json(const std::string& text) {
  CriticalValueTable table;
  try {
    const json doc = json::parse(text);
    for (const auto& j : doc.at("critical_values")) {
      CriticalValue cv;
      cv.method = method_from_string(j.at("method").get<std::string>());
      cv.T = j.at("T").get<std::size_t>();
      cv.lambda = j.at("lambda").get<double>();
      cv.alpha = j.at("alpha").get<double>();
      cv.cutoff = j.at("cutoff").get<double>();
      cv.se = j.at("se").get<double>();
      cv.B = j.at("B").get<std::size_t>();
      cv.seed = j.at("seed").get<std::uint64_t>();
      table.add(cv);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("critical value table JSON: ") + e.what());
  }
  return table;
}

NullStatistics simulate_null_statistics(std::size_t T, DependenceParam lam, std::size_t B,
                                        const RandomStream& stream, int workers) {
  return collect(run_replicates(B, stream, workers, [=](RandomStream& rs) {
    return BivariateSeries(sample_bhr(lam, T, rs));
  }));
}

NullStatistics simulate_step_statistics(std::size_t T, std::size_t tau, DependenceParam lambda1,
                                        DependenceParam lambdaT, std::size_t B,
                                        const RandomStream& stream, int workers) {
  return collect(run_replicates(B, stream, workers, step_sampler(T, tau, lambda1, lambdaT)));
}

std::pair<double, double> cutoff_with_se(const std::vector<double>& stats, double alpha,
                                         std::size_t resamples, RandomStream stream) {
  if (stats.size() < 2) throw InputError("need at least 2 statistics for a cutoff");
  const double p = 1.0 - alpha;
  const double cutoff = quantile_type7(stats, p);
  std::vector<double> boot(resamples);
  std::vector<double> draw(stats.size());
  for (auto& q : boot) {
    for (auto& d : draw) d = stats[stream.below(stats.size())];
    q = quantile_type7(draw, p);
  }
  return {cutoff, stddev(boot)};
}

CriticalValueTable simulate_critical_values(const SimulationConfig& cfg) {
  cfg.validate();
  const double lam = cfg.lambda1.lambda();
  const auto stats = simulate_null_statistics(cfg.T, cfg.lambda1, cfg.B,
                                              cell_stream(cfg.seed, kNullTag, cfg.T, lam),
                                              cfg.workers);
  CriticalValueTable table;
  for (Method m : {Method::LRT, Method::MIC}) {
    const auto& s = m == Method::LRT ? stats.lrt : stats.mic;
    for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
      const double a = cfg.alphas[i];
      const RandomStream se_stream = cell_stream(cfg.seed, kCutoffSeTag, cfg.T, lam)
                                         .substream(static_cast<std::uint64_t>(m) * 1000 + i);
      const auto [cut, se] = cutoff_with_se(s, a, kCutoffResamples, se_stream);
      table.upsert({m, cfg.T, lam, a, cut, se, s.size(), cfg.seed});
    }
  }
  return table;
}

const PowerPoint& PowerReport::at(Method m, double alpha) const {
  for (const auto& p : points) {
    if (p.method == m && same_lambda(p.alpha, alpha)) return p;
  }
  throw InputError("no power entry for " + std::string(to_string(m)) + " alpha=" + fmt(alpha));
}

PowerReport simulate_power(const SimulationConfig& cfg, const CriticalValueTable& table) {
  cfg.validate();
  const std::size_t tau = cfg.tau();
  const double l1 = cfg.lambda1.lambda();
  const double lT = cfg.lambdaT.lambda();
  // Resolve cutoffs before simulating so a missing key fails fast.
  std::vector<PowerPoint> points;
  for (Method m : {Method::LRT, Method::MIC}) {
    for (double a : cfg.alphas) points.push_back({m, a, table.at(m, cfg.T, l1, a).cutoff, 0.0, 0, 0});
  }
  if (tau < 1 || tau >= cfg.T) throw InputError("floor(beta * T) must lie in [1, T)");
  const auto stats = simulate_step_statistics(
      cfg.T, tau, cfg.lambda1, cfg.lambdaT, cfg.B,
      cell_stream(cfg.seed, kPowerTag, cfg.T, l1, lT, tau), cfg.workers);

  for (auto& p : points) {
    const auto& s = p.method == Method::LRT ? stats.lrt : stats.mic;
    p.used = s.size();
    p.rejections = static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [&](double v) { return v >= p.cutoff; }));
    p.power = static_cast<double>(p.rejections) / static_cast<double>(p.used);
  }
  return {cfg.T, tau, l1, lT, std::move(points), stats.dropped};
}

ConsistencyReport simulate_consistency(const SimulationConfig& cfg) {
  cfg.validate();
  if (cfg.lambda1 == cfg.lambdaT) throw InputError("consistency needs lambda1 != lambdaT");
  if (cfg.deltas.empty()) throw InputError("at least one delta is required");
  const std::size_t tau = cfg.tau();
  if (tau < 1 || tau >= cfg.T) throw InputError("floor(beta * T) must lie in [1, T)");
  const double l1 = cfg.lambda1.lambda();
  const double lT = cfg.lambdaT.lambda();
  const auto out =
      run_replicates(cfg.B, cell_stream(cfg.seed, kConsistencyTag, cfg.T, l1, lT, tau),
                     cfg.workers, step_sampler(cfg.T, tau, cfg.lambda1, cfg.lambdaT));

  ConsistencyReport rep;
  rep.T = cfg.T;
  rep.tau = tau;
  rep.lambda1 = l1;
  rep.lambdaT = lT;
  for (Method m : {Method::LRT, Method::MIC}) {
    ConsistencyMethod& cm = m == Method::LRT ? rep.lrt : rep.mic;
    cm.method = m;
    cm.deltas = cfg.deltas;
    std::vector<std::size_t> hits(cfg.deltas.size(), 0);
    double sum = 0.0;
    double sumsq = 0.0;
    for (const auto& o : out) {
      if (!o.ok) continue;
      const double err = static_cast<double>(m == Method::LRT ? o.tau_lrt : o.tau_mic) -
                         static_cast<double>(tau);
      sum += err;
      sumsq += err * err;
      ++cm.used;
      for (std::size_t i = 0; i < cfg.deltas.size(); ++i) {
        if (std::abs(err) <= static_cast<double>(cfg.deltas[i])) ++hits[i];
      }
    }
    const auto n = static_cast<double>(cm.used);
    cm.bias = sum / n;
    cm.mse = sumsq / n;
    for (auto h : hits) cm.inclusion.push_back(static_cast<double>(h) / n);
  }
  rep.dropped = static_cast<std::size_t>(
      std::count_if(out.begin(), out.end(), [](auto& o) { return !o.ok; }));
  return rep;
}

BootstrapPValue bootstrap_pvalue(const BivariateSeries& data, std::size_t B,
                                 const RandomStream& stream, int workers) {
  if (B < 200) throw InputError("bootstrap needs B >= 200");
  BootstrapPValue res;
  res.observed = detect_changepoint(data);
  res.lambda_hat = res.observed.lrt.lambda_null;
  const auto stats = simulate_null_statistics(data.size(), res.lambda_hat, B, stream, workers);
  res.replicates = stats.lrt.size();
  res.dropped = stats.dropped;
  const auto frac_ge = [](const std::vector<double>& s, double obs) {
    const auto k = std::count_if(s.begin(), s.end(), [&](double v) { return v >= obs; });
    return static_cast<double>(k) / static_cast<double>(s.size());
  };
  res.p_lrt = frac_ge(stats.lrt, res.observed.lrt.statistic);
  res.p_mic = frac_ge(stats.mic, res.observed.mic.statistic);
  return res;
}

std::string power_report_csv(const std::vector<PowerReport>& reports) {
  std::ostringstream os;
  os << "method,T,tau,lambda1,lambdaT,alpha,cutoff,power,rejections,used\n";
  for (const auto& r : reports) {
    for (const auto& p : r.points) {
      os << to_string(p.method) << ',' << r.T << ',' << r.tau << ',' << fmt(r.lambda1) << ','
         << fmt(r.lambdaT) << ',' << fmt(p.alpha) << ',' << fmt(p.cutoff) << ',' << fmt(p.power)
         << ',' << p.rejections << ',' << p.used << '\n';
    }
  }
  return os.str();
}

std::string consistency_report_csv(const std::vector<ConsistencyReport>& reports) {
  std::ostringstream os;
  os << "method,T,tau,lambda1,lambdaT,delta,inclusion,bias,mse,used\n";
  for (const auto& r : reports) {
    for (const auto* cm : {&r.lrt, &r.mic}) {
      for (std::size_t i = 0; i < cm->deltas.size(); ++i) {
        os << to_string(cm->method) << ',' << r.T << ',' << r.tau << ',' << fmt(r.lambda1) << ','
           << fmt(r.lambdaT) << ',' << cm->deltas[i] << ',' << fmt(cm->inclusion[i]) << ','
           << fmt(cm->bias) << ',' << fmt(cm->mse) << ',' << cm->used << '\n';
      }
    }
  }
  return os.str();
}

std::string power_report_json(const std::vector<PowerReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    json pts = json::array();
    for (const auto& p : r.points) {
      pts.push_back({{"method", std::string(to_string(p.method))},
                     {"alpha", p.alpha},
                     {"cutoff", p.cutoff},
                     {"power", p.power},
                     {"rejections", p.rejections},
                     {"used", p.used}});
    }
    arr.push_back({{"T", r.T},
                   {"tau", r.tau},
                   {"lambda1", r.lambda1},
                   {"lambdaT", r.lambdaT},
                   {"dropped", r.dropped},
                   {"points", pts}});
  }
  return json{{"power", arr}}.dump(2);
}

std::string consistency_report_json(const std::vector<ConsistencyReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    json methods = json::array();
    for (const auto* cm : {&r.lrt, &r.mic}) {
      methods.push_back({{"method", std::string(to_string(cm->method))},
                         {"deltas", cm->deltas},
                         {"inclusion", cm->inclusion},
                         {"bias", cm->bias},
                         {"mse", cm->mse},
                         {"used", cm->used}});
    }
    arr.push_back({{"T", r.T},
                   {"tau", r.tau},
                   {"lambda1", r.lambda1},
                   {"lambdaT", r.lambdaT},
                   {"dropped", r.dropped},
                   {"methods", methods}});
  }
  return json{{"consistency", arr}}.dump(2);
}

}  // namespace hrcp

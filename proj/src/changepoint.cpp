#include "hrcp/changepoint.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "hrcp/error.hpp"
#include "hrcp/optimize.hpp"

namespace hrcp {

std::string_view to_string(Method m) { return m == Method::LRT ? "LRT" : "MIC"; }

Method method_from_string(std::string_view s) {
  std::string up(s);
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "LRT") return Method::LRT;
  if (up == "MIC") return Method::MIC;
  throw InputError("unknown method '" + std::string(s) + "'");
}

namespace {

const double kThetaMin = std::log(kLambdaMin);
const double kThetaMax = std::log(kLambdaMax);
constexpr std::size_t kGridSize = 45;
constexpr double kEdgeSlack = 1e-6;
constexpr double kLrSlack = 1e-6;

using Points = std::span<const detail::PreparedPoint>;

std::vector<detail::PreparedPoint> prepare_all(const BivariateSeries& data) {
  std::vector<detail::PreparedPoint> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = detail::prepare(data[i]);
  return out;
}

double finite_or_lowest(double v) { return std::isfinite(v) ? v : -std::numeric_limits<double>::max(); }

double safe_sum(Points pts, double theta) {
  return finite_or_lowest(detail::log_pdf_sum(pts, std::exp(theta)));
}

// Standalone fits run once per series and afford a finer grid.
constexpr std::size_t kDenseGridSize = 4 * (kGridSize - 1) + 1;

double grid_theta(std::size_t k, std::size_t size = kGridSize) {
  return kThetaMin + (kThetaMax - kThetaMin) * static_cast<double>(k) / static_cast<double>(size - 1);
}

// In log Lambda the log-likelihood is flat to machine precision towards
// Lambda -> 0, but on short segments it can dip and then rise to a shallow
// hump narrower than the grid spacing. Every grid local maximum is refined
// (best kMaxPeaks by value) and the best refinement wins.
constexpr std::size_t kMaxPeaks = 3;

template <typename GridValue>
std::vector<std::size_t> grid_peaks(GridValue value, std::size_t size = kGridSize) {
  std::vector<double> v(size);
  for (std::size_t k = 0; k < size; ++k) v[k] = value(k);
  std::vector<std::size_t> peaks;
  for (std::size_t k = 0; k < size; ++k) {
    const bool rises = k == 0 || v[k] > v[k - 1];
    const bool holds = k + 1 == size || v[k] >= v[k + 1];
    if (rises && holds) peaks.push_back(k);
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  if (peaks.size() > kMaxPeaks) peaks.resize(kMaxPeaks);
  return peaks;
}

LikelihoodValue refine_bracket(Points pts, double lo, double hi) {
  const auto opt = brent_maximize([&](double theta) { return safe_sum(pts, theta); }, lo, hi);
  LikelihoodValue out;
  out.loglik = opt.value;
  out.lambda_at_optimum = DependenceParam(std::exp(opt.x));
  out.converged = opt.converged && opt.value > -std::numeric_limits<double>::max();
  out.iterations = opt.iterations;
  out.at_boundary = opt.x - kThetaMin < kEdgeSlack || kThetaMax - opt.x < kEdgeSlack;
  return out;
}

LikelihoodValue refine(Points pts, const std::vector<std::size_t>& peaks,
                       std::size_t size = kGridSize) {
  LikelihoodValue best;
  std::size_t iterations = 0;
  bool first = true;
  for (std::size_t k : peaks) {
    const auto r = refine_bracket(pts, grid_theta(k == 0 ? 0 : k - 1, size),
                                  grid_theta(std::min(k + 1, size - 1), size));
    iterations += r.iterations;
    if (first || r.loglik > best.loglik) best = r;
    first = false;
  }
  best.iterations = iterations;
  return best;
}

LikelihoodValue fit_dense(Points pts) {
  return refine(pts,
                grid_peaks([&](std::size_t k) { return safe_sum(pts, grid_theta(k, kDenseGridSize)); },
                           kDenseGridSize),
                kDenseGridSize);
}

// A segment's maximum is never below its value at the full-series MLE
// theta0; when the grid refinement ends up lower, refine around theta0 and
// fall back to theta0 itself. This keeps LR(tau) >= 0 by construction.
struct Anchor {
  double theta;
  double value;
};

LikelihoodValue anchored(Points pts, LikelihoodValue best, const Anchor& a) {
  if (best.loglik >= a.value) return best;
  const double step = grid_theta(1) - grid_theta(0);
  auto r = refine_bracket(pts, std::max(kThetaMin, a.theta - step), std::min(kThetaMax, a.theta + step));
  r.iterations += best.iterations;
  if (r.loglik < a.value) {
    r.loglik = a.value;
    r.lambda_at_optimum = DependenceParam(std::exp(a.theta));
    r.converged = true;
    r.at_boundary = a.theta - kThetaMin < kEdgeSlack || kThetaMax - a.theta < kEdgeSlack;
  }
  return r;
}

LikelihoodValue fit_segment_cold(Points seg, double theta0) {
  const auto best = refine(seg, grid_peaks([&](std::size_t k) { return safe_sum(seg, grid_theta(k)); }));
  return anchored(seg, best, {theta0, safe_sum(seg, theta0)});
}

/// Cumulative per-grid-point log-density sums, shared by every segment.
class GridPrefix {
 public:
  /// Rows 0..kGridSize-1 hold the grid; row kGridSize holds theta0.
  GridPrefix(Points pts, double theta0)
      : n_(pts.size()), theta0_(theta0), sums_((kGridSize + 1) * (pts.size() + 1), 0.0) {
    for (std::size_t k = 0; k <= kGridSize; ++k) {
      const double lambda = std::exp(k == kGridSize ? theta0 : grid_theta(k));
      double* row = &sums_[k * (n_ + 1)];
      for (std::size_t t = 0; t < n_; ++t) row[t + 1] = row[t] + detail::log_pdf_kernel(pts[t], lambda);
    }
  }
  [[nodiscard]] double segment(std::size_t k, std::size_t begin, std::size_t end) const {
    const double* row = &sums_[k * (n_ + 1)];
    return finite_or_lowest(row[end] - row[begin]);
  }
  [[nodiscard]] Anchor anchor(std::size_t begin, std::size_t end) const {
    return {theta0_, segment(kGridSize, begin, end)};
  }

 private:
  std::size_t n_;
  double theta0_;
  std::vector<double> sums_;
};

LikelihoodValue fit_prefixed(Points pts, const GridPrefix& grid, std::size_t begin, std::size_t end) {
  const Points seg = pts.subspan(begin, end - begin);
  const auto best = refine(seg, grid_peaks([&](std::size_t g) { return grid.segment(g, begin, end); }));
  return anchored(seg, best, grid.anchor(begin, end));
}

void check_trimmed(std::size_t T) {
  if (T < 2) throw InputError("changepoint: need at least 2 observations");
  const std::size_t tau0 = trim_bound(T);
  if (T < 2 * tau0 + 2) {
    throw InputError("changepoint: trimmed range is empty for T=" + std::to_string(T));
  }
}

}  // namespace

double loglik_h0(const BivariateSeries& data, DependenceParam lam) {
  if (data.empty()) throw InputError("loglik_h0: empty series");
  double sum = 0.0;
  for (std::size_t t = 0; t < data.size(); ++t) {
    const double v = detail::log_pdf_kernel(detail::prepare(data[t]), lam.lambda());
    if (!std::isfinite(v)) {
      throw NumericalError("loglik_h0: non-finite log-density at index " + std::to_string(t));
    }
    sum += v;
  }
  return sum;
}

LikelihoodValue mle_h0(const BivariateSeries& data) {
  if (data.size() < 2) throw InputError("mle_h0: need at least 2 observations");
  const auto pts = prepare_all(data);
  return fit_dense(pts);
}

double loglik_ha(const BivariateSeries& data, std::size_t tau, DependenceParam lam1,
                 DependenceParam lamT) {
  if (tau < 1 || tau >= data.size()) throw InputError("loglik_ha: tau must satisfy 1 <= tau < T");
  return loglik_h0(data.slice(0, tau), lam1) + loglik_h0(data.slice(tau, data.size()), lamT);
}

std::pair<LikelihoodValue, LikelihoodValue> mle_ha(const BivariateSeries& data, std::size_t tau) {
  if (tau < 2 || data.size() < tau + 2) {
    throw InputError("mle_ha: both segments need at least 2 observations");
  }
  const auto pts = prepare_all(data);
  const Points all(pts);
  return {fit_dense(all.first(tau)), fit_dense(all.subspan(tau))};
}

std::size_t trim_bound(std::size_t T) {
  if (T < 2) throw InputError("trim_bound: T must be at least 2");
  return 2 * static_cast<std::size_t>(std::floor(std::log(static_cast<double>(T))));
}

bool ChangepointScan::all_converged() const { return null_fit.converged && first_unconverged_tau() == 0; }

std::size_t ChangepointScan::first_unconverged_tau() const {
  for (std::size_t i = 0; i < count(); ++i) {
    if (!pre[i].converged || !post[i].converged) return first_tau() + i;
  }
  return 0;
}

std::vector<double> ChangepointScan::lr_values() const {
  std::vector<double> out(count());
  for (std::size_t i = 0; i < count(); ++i) {
    const double lr = -2.0 * (null_fit.loglik - (pre[i].loglik + post[i].loglik));
    if (lr < -kLrSlack) {
      throw NumericalError("LR(" + std::to_string(first_tau() + i) + ") = " + std::to_string(lr) +
                           " is negative beyond tolerance; a fit missed its global maximum");
    }
    out[i] = std::max(lr, 0.0);
  }
  return out;
}

std::vector<double> ChangepointScan::mic_values() const {
  const double log_t = std::log(static_cast<double>(T));
  const auto td = static_cast<double>(T);
  std::vector<double> out(count());
  for (std::size_t i = 0; i < count(); ++i) {
    const double tau = static_cast<double>(first_tau() + i);
    const double c = 2.0 * tau / td - 1.0;
    out[i] = -2.0 * (pre[i].loglik + post[i].loglik) + (2.0 + c * c) * log_t;
  }
  return out;
}

double ChangepointScan::mic_null() const {
  return -2.0 * null_fit.loglik + std::log(static_cast<double>(T));
}

ChangepointScan scan_changepoints(const BivariateSeries& data, ProfileStrategy strategy) {
  check_trimmed(data.size());
  const auto prepared = prepare_all(data);
  const Points pts(prepared);

  ChangepointScan scan;
  scan.T = data.size();
  scan.tau0 = trim_bound(scan.T);
  scan.null_fit = fit_dense(pts);
  const double theta0 = std::log(scan.null_fit.lambda_at_optimum.lambda());
  const std::size_t n = scan.T - 2 * scan.tau0 - 1;
  scan.pre.resize(n);
  scan.post.resize(n);
  const std::size_t first = scan.first_tau();

  switch (strategy) {
    case ProfileStrategy::Incremental: {
      const GridPrefix grid(pts, theta0);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t tau = first + i;
        scan.pre[i] = fit_prefixed(pts, grid, 0, tau);
        scan.post[i] = fit_prefixed(pts, grid, tau, scan.T);
      }
      break;
    }
    case ProfileStrategy::ColdSerial:
      for (std::size_t i = 0; i < n; ++i) {
        scan.pre[i] = fit_segment_cold(pts.first(first + i), theta0);
        scan.post[i] = fit_segment_cold(pts.subspan(first + i), theta0);
      }
      break;
    case ProfileStrategy::Parallel:
#pragma omp parallel for schedule(dynamic)
      for (std::size_t i = 0; i < n; ++i) {
        scan.pre[i] = fit_segment_cold(pts.first(first + i), theta0);
        scan.post[i] = fit_segment_cold(pts.subspan(first + i), theta0);
      }
      break;
  }
  return scan;
}

namespace {

void require_converged(const ChangepointScan& scan) {
  if (!scan.null_fit.converged) throw NumericalError("H0 maximum-likelihood fit did not converge");
  if (const std::size_t tau = scan.first_unconverged_tau(); tau != 0) {
    throw NumericalError("segment maximum-likelihood fit did not converge at tau=" + std::to_string(tau));
  }
}

}  // namespace

std::vector<double> lr_profile(const BivariateSeries& data, ProfileStrategy strategy) {
  const auto scan = scan_changepoints(data, strategy);
  require_converged(scan);
  return scan.lr_values();
}

std::vector<double> mic_profile(const BivariateSeries& data, ProfileStrategy strategy) {
  const auto scan = scan_changepoints(data, strategy);
  require_converged(scan);
  return scan.mic_values();
}

double mic_null(const BivariateSeries& data) {
  const auto fit = mle_h0(data);
  if (!fit.converged) throw NumericalError("mic_null: H0 fit did not converge");
  return -2.0 * fit.loglik + std::log(static_cast<double>(data.size()));
}

ChangepointResult lrt_statistic(const ChangepointScan& scan) {
  ChangepointResult r;
  r.method = Method::LRT;
  r.first_tau = scan.first_tau();
  r.profile = scan.lr_values();
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.profile.size(); ++i) {
    if (r.profile[i] > r.profile[best]) best = i;
  }
  r.statistic = r.profile[best];
  r.tau_hat = r.first_tau + best;
  r.lambda_null = scan.null_fit.lambda_at_optimum;
  r.lambda_pre = scan.pre[best].lambda_at_optimum;
  r.lambda_post = scan.post[best].lambda_at_optimum;
  r.mic_null = scan.mic_null();
  return r;
}

ChangepointResult mic_statistic(const ChangepointScan& scan) {
  ChangepointResult r;
  r.method = Method::MIC;
  r.first_tau = scan.first_tau();
  r.profile = scan.mic_values();
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.profile.size(); ++i) {
    if (r.profile[i] < r.profile[best]) best = i;
  }
  r.mic_null = scan.mic_null();
  r.statistic = r.mic_null - r.profile[best] + std::log(static_cast<double>(scan.T));
  r.tau_hat = r.first_tau + best;
  r.lambda_null = scan.null_fit.lambda_at_optimum;
  r.lambda_pre = scan.pre[best].lambda_at_optimum;
  r.lambda_post = scan.post[best].lambda_at_optimum;
  return r;
}

ChangepointResult lrt_statistic(const BivariateSeries& data, ProfileStrategy strategy) {
  return detect_changepoint(data, strategy).lrt;
}

ChangepointResult mic_statistic(const BivariateSeries& data, ProfileStrategy strategy) {
  return detect_changepoint(data, strategy).mic;
}

DetectionResult detect_changepoint(const BivariateSeries& data, ProfileStrategy strategy) {
  const auto scan = scan_changepoints(data, strategy);
  require_converged(scan);
  return {lrt_statistic(scan), mic_statistic(scan)};
}

}  // namespace hrcp

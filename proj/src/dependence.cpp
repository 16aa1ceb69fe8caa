#include "hrcp/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hrcp/error.hpp"
#include "hrcp/stats.hpp"

namespace hrcp {

double ChiEstimate::reported() const { return std::clamp(chi_hat, 0.0, 1.0); }

namespace {

void check_chi_inputs(const BivariateSeries& pairs, double u) {
  if (pairs.size() < 20) throw InputError("empirical chi: need at least 20 pairs");
  if (!(u > 0.0 && u < 1.0)) throw InputError("empirical chi: u must lie in (0, 1)");
}

template <typename Exceeds>
ChiEstimate chi_count(const BivariateSeries& pairs, double u, Exceeds exceeds) {
  const auto rx = average_ranks(pairs.xs());
  const auto ry = average_ranks(pairs.ys());
  const double threshold = u * (static_cast<double>(pairs.size()) + 1.0);
  ChiEstimate est{u, 0.0, 0, 0};
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    if (exceeds(rx[t], threshold)) {
      ++est.n_marginal;
      if (exceeds(ry[t], threshold)) ++est.n_exceed;
    }
  }
  if (est.n_marginal == 0) {
    throw InputError("empirical chi: no marginal exceedances at u=" + std::to_string(u));
  }
  est.chi_hat = static_cast<double>(est.n_exceed) / static_cast<double>(est.n_marginal);
  return est;
}

std::vector<double> pit(std::span<const double> values) {
  auto r = average_ranks(values);
  const double denom = static_cast<double>(values.size()) + 1.0;
  for (double& v : r) v /= denom;
  return r;
}

double half_mean_abs_diff(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return 0.5 * sum / static_cast<double>(a.size());
}

}  // namespace

ChiEstimate empirical_chi_upper(const BivariateSeries& pairs, double u) {
  check_chi_inputs(pairs, u);
  return chi_count(pairs, u, [](double r, double th) { return r > th; });
}

ChiEstimate empirical_chi_lower(const BivariateSeries& pairs, double u) {
  check_chi_inputs(pairs, u);
  return chi_count(pairs, u, [](double r, double th) { return r < th; });
}

double f_madogram(std::span<const double> series, std::size_t lag) {
  if (lag == 0) throw InputError("f_madogram: lag must be at least 1");
  if (series.size() <= lag + 10) {
    throw InputError("f_madogram: series length " + std::to_string(series.size()) +
                     " too short for lag " + std::to_string(lag));
  }
  const auto f = pit(series);
  const std::size_t m = f.size() - lag;
  return half_mean_abs_diff(std::span(f).first(m), std::span(f).subspan(lag, m));
}

double cross_madogram(const BivariateSeries& pairs) {
  if (pairs.size() < 2) throw InputError("cross_madogram: need at least 2 pairs");
  return half_mean_abs_diff(pit(pairs.xs()), pit(pairs.ys()));
}

double chi_from_madogram(double nu) {
  if (!(nu >= 0.0 && nu < 0.5)) throw std::invalid_argument("chi_from_madogram: nu must lie in [0, 0.5)");
  return 2.0 - (1.0 + 2.0 * nu) / (1.0 - 2.0 * nu);
}

double madogram_chi(const BivariateSeries& pairs) { return chi_from_madogram(cross_madogram(pairs)); }

std::vector<double> lagged_madogram_chi(std::span<const double> series, std::size_t max_lag) {
  std::vector<double> out;
  out.reserve(max_lag);
  for (std::size_t h = 1; h <= max_lag; ++h) out.push_back(chi_from_madogram(f_madogram(series, h)));
  return out;
}

IndependenceTestResult independence_bootstrap_test(const BivariateSeries& pairs, std::size_t B,
                                                   double alpha, const RandomStream& stream) {
  if (B < 200) throw InputError("independence_bootstrap_test: B must be at least 200");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("independence_bootstrap_test: alpha must lie in (0, 1)");
  const auto fx = pit(pairs.xs());
  const auto fy = pit(pairs.ys());
  const std::size_t n = fx.size();

  std::vector<double> null_chi(B);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < B; ++b) {
    RandomStream rs = stream.substream(b);
    std::vector<double> perm = fy;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rs.below(i + 1)]);
    null_chi[b] = chi_from_madogram(half_mean_abs_diff(fx, perm));
  }

  IndependenceTestResult out;
  out.replicates = B;
  out.observed_chi = chi_from_madogram(half_mean_abs_diff(fx, fy));
  out.critical_value = quantile_type7(null_chi, 1.0 - alpha);
  out.reject = out.observed_chi > out.critical_value;
  return out;
}

}  // namespace hrcp

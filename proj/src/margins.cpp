#include "hrcp/margins.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <string>

#include "hrcp/error.hpp"
#include "hrcp/normal.hpp"

namespace hrcp {

GumbelMargin gumbel_pwm_fit(std::span<const double> sample) {
  const std::size_t m = sample.size();
  if (m < 5) throw InputError("gumbel_pwm_fit: need at least 5 observations, got " + std::to_string(m));
  std::vector<double> sorted(sample.begin(), sample.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw InputError("gumbel_pwm_fit: non-finite observation");
  }
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) throw InputError("gumbel_pwm_fit: zero-variance sample");

  double b0 = 0.0;
  double b1 = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    b0 += sorted[j];
    b1 += static_cast<double>(j) * sorted[j];
  }
  const auto md = static_cast<double>(m);
  b0 /= md;
  b1 /= md * (md - 1.0);
  const double sigma = (2.0 * b1 - b0) / std::numbers::ln2;
  if (!(sigma > 0.0)) throw InputError("gumbel_pwm_fit: non-positive scale estimate");
  return {b0 - kEulerGamma * sigma, sigma};
}

std::size_t window_start(std::size_t t, std::size_t n, std::size_t window) {
  const std::size_t left = window / 2;
  const std::size_t start = t > left ? t - left : 0;
  return std::min(start, n - window);
}

namespace {

void check_window(std::size_t n, std::size_t window) {
  if (window < 5) throw InputError("local_pwm_fit: window must be at least 5");
  if (n < window) {
    throw InputError("local_pwm_fit: series length " + std::to_string(n) +
                     " is shorter than the window " + std::to_string(window));
  }
}

GumbelMargin fit_at(std::span<const double> series, std::size_t t, std::size_t window) {
  try {
    return gumbel_pwm_fit(series.subspan(window_start(t, series.size(), window), window));
  } catch (const InputError& e) {
    throw InputError("local_pwm_fit at index " + std::to_string(t) + ": " + e.what());
  }
}

}  // namespace

MarginProfile local_pwm_fit_serial(std::span<const double> series, std::size_t window) {
  check_window(series.size(), window);
  MarginProfile out{std::vector<GumbelMargin>(series.size()), window};
  for (std::size_t t = 0; t < series.size(); ++t) out.margins[t] = fit_at(series, t, window);
  return out;
}

MarginProfile local_pwm_fit(std::span<const double> series, std::size_t window) {
  check_window(series.size(), window);
  const std::size_t n = series.size();
  MarginProfile out{std::vector<GumbelMargin>(n), window};
  std::exception_ptr failure;
  std::size_t failed_at = n;
#pragma omp parallel for schedule(static)
  for (std::size_t t = 0; t < n; ++t) {
    try {
      out.margins[t] = fit_at(series, t, window);
    } catch (...) {
#pragma omp critical
      if (t < failed_at) {
        failed_at = t;
        failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<double> to_standard_gumbel(std::span<const double> series, const MarginProfile& profile) {
  if (series.size() != profile.margins.size()) {
    throw InputError("to_standard_gumbel: series length " + std::to_string(series.size()) +
                     " does not match profile length " + std::to_string(profile.margins.size()));
  }
  std::vector<double> out(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) {
    out[t] = (series[t] - profile.margins[t].mu) / profile.margins[t].sigma;
  }
  return out;
}

std::vector<double> from_standard_gumbel(std::span<const double> standardized,
                                         const MarginProfile& profile) {
  if (standardized.size() != profile.margins.size()) {
    throw InputError("from_standard_gumbel: length mismatch");
  }
  std::vector<double> out(standardized.size());
  for (std::size_t t = 0; t < standardized.size(); ++t) {
    out[t] = profile.margins[t].mu + profile.margins[t].sigma * standardized[t];
  }
  return out;
}

}  // namespace hrcp

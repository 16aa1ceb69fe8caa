#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hrcp {

/// Gumbel location/scale; the shape is fixed at zero.
struct GumbelMargin {
  double mu = 0.0;
  double sigma = 1.0;
  friend bool operator==(const GumbelMargin&, const GumbelMargin&) = default;
};

/// Per-index margins from a sliding window of constant size.
struct MarginProfile {
  std::vector<GumbelMargin> margins;
  std::size_t window = 0;
  friend bool operator==(const MarginProfile&, const MarginProfile&) = default;
};

inline constexpr std::size_t kDefaultWindow = 100;

/// Probability-weighted-moment Gumbel fit with unbiased plotting positions:
///   b0 = mean, b1 = sum_j (j-1)/(m-1) x_(j) / m,
///   sigma = (2 b1 - b0) / log 2, mu = b0 - gamma_E * sigma.
/// Throws InputError on fewer than 5 points, non-finite values, or a
/// degenerate (zero-spread) sample.
GumbelMargin gumbel_pwm_fit(std::span<const double> sample);

/// First index of the window used for position t. Windows are clamped at
/// the edges so that every window holds exactly `window` points; interior
/// windows take floor(w/2) left and w-1-floor(w/2) right neighbours.
std::size_t window_start(std::size_t t, std::size_t n, std::size_t window);

/// Local PWM fit at every index (OpenMP over indices). Throws InputError if
/// window < 5 or the series is shorter than the window; fit failures are
/// rethrown with the offending index.
MarginProfile local_pwm_fit(std::span<const double> series, std::size_t window = kDefaultWindow);

/// Serial reference for local_pwm_fit; results are identical.
MarginProfile local_pwm_fit_serial(std::span<const double> series,
                                   std::size_t window = kDefaultWindow);

/// (R_t - mu_t) / sigma_t. Throws InputError on length mismatch.
std::vector<double> to_standard_gumbel(std::span<const double> series, const MarginProfile& profile);

/// Inverse map mu_t + sigma_t * z_t.
std::vector<double> from_standard_gumbel(std::span<const double> standardized,
                                         const MarginProfile& profile);

}  // namespace hrcp

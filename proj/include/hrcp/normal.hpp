#pragma once

#include <cmath>
#include <numbers>

namespace hrcp {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;
inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Standard normal density.
inline double norm_pdf(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }

/// Standard normal CDF via erfc, accurate in both tails.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

/// Standard normal survival function 1 - Phi(z), without cancellation.
inline double norm_sf(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

/// log Phi(z). Uses log1p for the upper tail and an asymptotic series once
/// erfc underflows in the lower tail.
double log_norm_cdf(double z);

/// Inverse of norm_cdf on (0, 1).
double norm_quantile(double p);

}  // namespace hrcp

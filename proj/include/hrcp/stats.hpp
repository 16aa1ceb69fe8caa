#pragma once

#include <span>
#include <vector>

namespace hrcp {

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7). Throws std::invalid_argument on empty input.
double quantile_type7(std::span<const double> values, double p);

/// Same as quantile_type7 but on an already sorted range.
double quantile_sorted(std::span<const double> sorted, double p);

/// Average ranks 1..n (ties share the mean rank).
std::vector<double> average_ranks(std::span<const double> values);

double mean(std::span<const double> values);
/// Unbiased sample standard deviation.
double stddev(std::span<const double> values);

}  // namespace hrcp

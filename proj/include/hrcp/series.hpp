#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hrcp/bhr.hpp"

namespace hrcp {

/// Time-ordered pairs on standard Gumbel margins, t = 1..T.
class BivariateSeries {
 public:
  BivariateSeries() = default;
  /// Throws InputError if any coordinate is not finite.
  explicit BivariateSeries(std::vector<GumbelPair> pairs);
  BivariateSeries(std::span<const double> xs, std::span<const double> ys);

  [[nodiscard]] std::size_t size() const { return pairs_.size(); }
  [[nodiscard]] bool empty() const { return pairs_.empty(); }
  [[nodiscard]] const GumbelPair& operator[](std::size_t i) const { return pairs_[i]; }
  [[nodiscard]] std::span<const GumbelPair> pairs() const { return pairs_; }
  [[nodiscard]] auto begin() const { return pairs_.begin(); }
  [[nodiscard]] auto end() const { return pairs_.end(); }

  [[nodiscard]] std::vector<double> xs() const;
  [[nodiscard]] std::vector<double> ys() const;
  [[nodiscard]] BivariateSeries reversed() const;
  [[nodiscard]] BivariateSeries slice(std::size_t begin, std::size_t end) const;
  [[nodiscard]] BivariateSeries concat(const BivariateSeries& tail) const;

  friend bool operator==(const BivariateSeries&, const BivariateSeries&) = default;

 private:
  std::vector<GumbelPair> pairs_;
};

}  // namespace hrcp

#include "hrcp/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hrcp/error.hpp"

namespace hrcp {

BivariateSeries::BivariateSeries(std::vector<GumbelPair> pairs) : pairs_(std::move(pairs)) {
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (!std::isfinite(pairs_[i].x) || !std::isfinite(pairs_[i].y)) {
      throw InputError("BivariateSeries: non-finite coordinate at index " + std::to_string(i));
    }
  }
}

BivariateSeries::BivariateSeries(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InputError("BivariateSeries: component lengths differ");
  std::vector<GumbelPair> pairs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) pairs[i] = {xs[i], ys[i]};
  *this = BivariateSeries(std::move(pairs));
}

std::vector<double> BivariateSeries::xs() const {
  std::vector<double> out(pairs_.size());
  std::transform(pairs_.begin(), pairs_.end(), out.begin(), [](const GumbelPair& p) { return p.x; });
  return out;
}

std::vector<double> BivariateSeries::ys() const {
  std::vector<double> out(pairs_.size());
  std::transform(pairs_.begin(), pairs_.end(), out.begin(), [](const GumbelPair& p) { return p.y; });
  return out;
}

BivariateSeries BivariateSeries::reversed() const {
  BivariateSeries out;
  out.pairs_.assign(pairs_.rbegin(), pairs_.rend());
  return out;
}

BivariateSeries BivariateSeries::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > pairs_.size()) throw InputError("BivariateSeries::slice: bad range");
  BivariateSeries out;
  out.pairs_.assign(pairs_.begin() + static_cast<std::ptrdiff_t>(begin),
                    pairs_.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

BivariateSeries BivariateSeries::concat(const BivariateSeries& tail) const {
  BivariateSeries out = *this;
  out.pairs_.insert(out.pairs_.end(), tail.pairs_.begin(), tail.pairs_.end());
  return out;
}

}  // namespace hrcp

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hrcp {

/// Counter-based random stream (Philox4x32-10).
///
/// The 64-bit seed is the Philox key. The upper half of the 128-bit counter
/// holds a stream path hash, so `substream(id)` yields an independent
/// sequence determined only by (seed, path, id); the lower half counts
/// blocks. Streams are cheap values: copy one to fork, never share one
/// between threads.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed, std::uint64_t path = 0);

  [[nodiscard]] RandomStream substream(std::uint64_t id) const;

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard Gumbel draw by inverse CDF.
  double gumbel();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t path() const { return path_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t path_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int cursor_ = 4;
};

/// Raw Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

}  // namespace hrcp

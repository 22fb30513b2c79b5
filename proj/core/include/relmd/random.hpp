#pragma once

#include <cstdint>
#include <limits>

namespace relmd {

/// Counter-keyed SplitMix64 stream.
///
/// The key (seed, trial, step, stream) is folded into the 64-bit state by
/// successive SplitMix64 finalisations, so every (trial, step, oracle)
/// triple owns an independent stream and results never depend on the order
/// in which trials or draws happen. Conversions are fixed and
/// platform-independent:
///   uniform()  = (next() >> 11) * 2^-53                     in [0, 1)
///   normal()   = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)          (Box-Muller, cosine branch)
class KeyedStream {
 public:
  using result_type = std::uint64_t;

  explicit KeyedStream(std::uint64_t seed, std::uint64_t trial = 0, std::uint64_t step = 0,
                       std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next(); }
  result_type next() noexcept;

  double uniform() noexcept;
  double normal() noexcept;
  double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }
  /// +1 or -1 with equal probability.
  double rademacher() noexcept;

 private:
  std::uint64_t state_;
};

}  // namespace relmd

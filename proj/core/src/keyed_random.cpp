#include "relmd/random.hpp"

#include <cmath>
#include <numbers>

namespace relmd {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

KeyedStream::KeyedStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t step,
                         std::uint64_t stream) noexcept {
  std::uint64_t s = finalize(seed + kGolden);
  s = finalize(s ^ (trial * kGolden + 1));
  s = finalize(s ^ (step * kGolden + 2));
  s = finalize(s ^ (stream * kGolden + 3));
  state_ = s;
}

KeyedStream::result_type KeyedStream::next() noexcept {
  state_ += kGolden;
  return finalize(state_);
}

double KeyedStream::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double KeyedStream::normal() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double KeyedStream::rademacher() noexcept { return (next() >> 63) != 0 ? 1.0 : -1.0; }

}  // namespace relmd

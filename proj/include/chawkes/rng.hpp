#pragma once

// SplitMix64: output k of a stream is mix(state0 + k * gamma), i.e. a counter
// passed through a bijective finalizer. Streams for (seed, path index) are
// keyed by hashing both into the starting counter, so any path can be
// regenerated independently of how paths are spread over workers.

#include <cstdint>
#include <limits>

namespace chawkes {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(state_ += kGamma); }

  /// Uniform in (0, 1), never exactly 0 or 1.
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

inline SplitMix64 path_stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix64(seed ^ mix64(index * SplitMix64::kGamma + 1)));
}

}  // namespace chawkes

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace affbench {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer, including the leading golden-gamma increment.
constexpr std::uint64_t mix64(std::uint64_t s) noexcept {
  std::uint64_t z = s + kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based 64-bit stream. Draw k is mix64(seed + k * gamma), which is
/// exactly SplitMix64 started at `seed`.
class Stream {
 public:
  constexpr explicit Stream(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next_u64() noexcept {
    const std::uint64_t out = mix64(state_);
    state_ += kGoldenGamma;
    return out;
  }

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Index in [0, n).
  std::size_t below(std::size_t n) noexcept {
    auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double gaussian() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

/// Stream for instance generation, derived from function, instance and a tag
/// that separates independent uses (optimum, rotations, peaks).
inline Stream instance_stream(int function_id, int instance_id, int stream_tag) noexcept {
  const std::uint64_t key = static_cast<std::uint64_t>(function_id) +
                            10000ULL * static_cast<std::uint64_t>(instance_id) +
                            1000000007ULL * static_cast<std::uint64_t>(stream_tag);
  return Stream(mix64(key));
}

}  // namespace affbench

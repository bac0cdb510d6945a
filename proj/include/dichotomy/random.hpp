#pragma once

#include <cstdint>

namespace dichotomy {

/// SplitMix64, a counter-based 64-bit generator.
///
/// State transition: state += 0x9E3779B97F4A7C15 (mod 2^64). Output is the
/// new state passed through the finalizer
///   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
///   z ^= z >> 27; z *= 0x94D049BB133111EB;
///   z ^= z >> 31.
/// Uniform doubles take the top 53 bits: (z >> 11) * 2^-53, in [0, 1).
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}

  constexpr std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  constexpr std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// Stream for one sampled path: initial state seed XOR path index.
constexpr SplitMix64 path_stream(std::uint64_t seed, std::uint64_t path_index) {
  return SplitMix64(seed ^ path_index);
}

}  // namespace dichotomy

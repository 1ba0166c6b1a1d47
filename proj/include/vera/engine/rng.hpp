#pragma once

#include <cstdint>
#include <initializer_list>

namespace vera::rng {

// Counter-based randomness built on SplitMix64 (Steele, Lea & Flood 2014).
//
// Every stochastic decision draws from a short stream whose starting state is
// a key derived from (seed, month, rule index, agent id). Draws therefore do
// not depend on how many numbers were consumed elsewhere or in which order
// agents are visited. The algorithm is part of the reproducibility contract:
// changing it changes every run.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Reference SplitMix64 generator: state += golden; return mix64(state).
class SplitMix64 {
 public:
  constexpr explicit SplitMix64(std::uint64_t state) : state_(state) {}

  constexpr std::uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  constexpr bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n); n > 0. Unbiased (rejection sampling).
  constexpr std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
  }

 private:
  std::uint64_t state_;
};

/// Folds the parts into one key; order-sensitive.
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t key = 0x6a09e667f3bcc908ULL;
  for (std::uint64_t part : parts) key = mix64(key ^ mix64(part + kGolden));
  return key;
}

constexpr SplitMix64 stream(std::initializer_list<std::uint64_t> parts) {
  return SplitMix64(derive_key(parts));
}

}  // namespace vera::rng

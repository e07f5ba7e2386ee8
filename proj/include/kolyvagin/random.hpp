#pragma once

// Seeded, splittable randomness. Every random object in the engine is drawn
// from a Rng derived from one 64-bit seed, so any failure replays from
// (seed, stream) alone.

#include <cstdint>
#include <random>
#include <stdexcept>

#include "modring.hpp"

namespace kolyvagin {

/// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed of child stream `index` of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }
  Rng split(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }

  /// Uniform in [0, n).
  Int below(Int n) {
    if (n <= 0) throw std::invalid_argument("Rng::below needs a positive bound");
    return static_cast<Int>(std::uniform_int_distribution<std::uint64_t>(0, static_cast<std::uint64_t>(n - 1))(engine_));
  }
  /// Uniform in [lo, hi].
  Int between(Int lo, Int hi) { return lo + below(hi - lo + 1); }
  bool chance(Int num, Int den) { return below(den) < num; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace kolyvagin

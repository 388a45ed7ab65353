#pragma once

#include <cstdint>
#include <random>

namespace dualcop {

/// SplitMix64 finalizer; a bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for replication `index` of a run seeded with `seed`:
/// mix64(mix64(seed) ^ (index + 1)).
constexpr std::uint64_t subseed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ (index + 1));
}

/// Mersenne Twister with a platform-independent map to the open unit interval.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw on (0,1): top 53 bits, offset by half an ulp so 0 is never returned.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dualcop

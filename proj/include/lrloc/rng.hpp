#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lrloc::rng {

inline constexpr std::string_view kRngId = "mt19937_64+splitmix64";
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of realization `index` under `master_seed`: the (index+1)-th SplitMix64
/// output of a generator whose state starts at master_seed. Injective in index.
constexpr std::uint64_t seed_for(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return mix64(master_seed + (index + 1) * kGoldenGamma);
}

/// Per-realization stream. The engine output is fixed by the standard; the
/// mappings below are spelled out so draws are reproducible everywhere.
class Stream {
public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), bound > 0, by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return x % bound;
    }
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace lrloc::rng

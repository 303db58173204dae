#pragma once

#include <cstdint>
#include <random>

namespace ncd {

/// Sampling generator, version 1.
///
/// std::mt19937_64 is fully specified by the standard, so its raw output is
/// identical on every conforming platform. The standard distributions are
/// not, which is why bounded draws use explicit rejection sampling here.
class SampleRng {
public:
  static constexpr int kVersion = 1;

  explicit SampleRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t draw = engine_();
    while (draw >= limit) {
      draw = engine_();
    }
    return draw % bound;
  }

private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; derives independent stream seeds from one base seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace ncd

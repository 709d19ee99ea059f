#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace garagemon {

// Deterministic random source used by every seeded component.
//
// std::mt19937_64 is fully specified by the standard, and the transforms
// below avoid std::*_distribution, whose output differs between standard
// library implementations. Same seed, same stream, on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound); bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) { return gen_() % bound; }

  // Box-Muller transform; sigma == 0 yields exactly `mean` (the draw still
  // consumes two words so call sequences stay aligned across noise levels).
  double gaussian(double mean, double sigma) {
    const double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;       // [0, 1)
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    return mean + sigma * z;
  }

  // splitmix64 of (seed, stream), for deriving independent per-trial seeds.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::mt19937_64 gen_;
};

}  // namespace garagemon

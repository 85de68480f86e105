#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace faasim {

/// Seeded random stream with explicit inverse-transform sampling so that
/// draws are reproducible across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : rng_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return (rng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Exponential with the given rate (mean 1/rate).
  double exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
  }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    // Rejection sampling keeps the distribution exact for any n.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = rng_();
    } while (v >= limit);
    return v % n;
  }

 private:
  std::mt19937_64 rng_;
};

/// Derives independent per-purpose seeds from one run seed, e.g.
/// seed_for(seed, "arrivals:3"). Stable across platforms (FNV-1a + splitmix).
std::uint64_t seed_for(std::uint64_t run_seed, const std::string& name);

inline RandomStream named_stream(std::uint64_t run_seed, const std::string& name) {
  return RandomStream(seed_for(run_seed, name));
}

}  // namespace faasim

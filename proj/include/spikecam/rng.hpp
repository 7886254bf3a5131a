#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace spikecam {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Derives an independent seed from a base seed and a tuple of counters.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                           std::uint64_t c = 0) {
  return splitmix64(splitmix64(splitmix64(seed ^ splitmix64(a)) ^ b) + c);
}

// Small counter-based generator, cheap enough to instantiate per pixel/tick so
// parallel and serial simulations draw identical numbers.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ull;
    auto z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // The standard distributions differ between library implementations; these
  // are spelled out so seeded output is the same everywhere.

  // Box-Muller, one variate per call.
  double normal(double mean, double sigma) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Inversion by sequential search, in chunks small enough that exp(-mean)
  // stays normal.
  std::int64_t poisson(double mean) {
    constexpr double kChunk = 256.0;
    std::int64_t total = 0;
    while (mean > 0.0) {
      const double lambda = std::min(mean, kChunk);
      mean -= lambda;
      double p = std::exp(-lambda);
      double cdf = p;
      const double u = uniform();
      std::int64_t k = 0;
      while (u > cdf && p > 0.0) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cdf += p;
      }
      total += k;
    }
    return total;
  }

 private:
  std::uint64_t state_;
};

}  // namespace spikecam

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace cfswipt {

// SplitMix64 finalizer. Used both for stream generation and as the stable
// seed-derivation hash of the experiment harness (drop seeds must not move
// when sweep grids grow, so the combiner below is part of the file contract).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t seed_combine(std::uint64_t seed, std::uint64_t v) {
  return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL + v));
}

// Small deterministic PRNG. Independent of std:: distribution internals so
// that results are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so that low-entropy seeds (0, 1, 2, ...) decorrelate.
    next_u64();
    next_u64();
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64(state_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller; second draw is cached.
  double normal() {
    if (have_cache_) {
      have_cache_ = false;
      return cache_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    // Avoid log(0).
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    cache_ = r * std::sin(t);
    have_cache_ = true;
    return r * std::cos(t);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // CN(0, variance): independent real/imag parts with variance/2 each.
  std::complex<double> complex_normal(double variance) {
    const double s = std::sqrt(0.5 * variance);
    const double re = normal() * s;
    const double im = normal() * s;
    return {re, im};
  }

 private:
  std::uint64_t state_;
  double cache_ = 0.0;
  bool have_cache_ = false;
};

}  // namespace cfswipt

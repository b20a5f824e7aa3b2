#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace viewfx {

/// Deterministic random stream. All stochastic code in the project draws from
/// one of these; independent streams are derived by hashing a parent seed with
/// substream keys, so results do not depend on evaluation order or worker
/// count.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : engine_(mix(seed)) {}

  /// Derives an independent child stream from (seed, key parts).
  static RngStream derive(uint64_t seed, uint64_t k0, uint64_t k1 = 0, uint64_t k2 = 0) {
    uint64_t h = mix(seed);
    h = mix(h ^ (0x9e3779b97f4a7c15ull + k0));
    h = mix(h ^ (0xbf58476d1ce4e5b9ull + k1));
    h = mix(h ^ (0x94d049bb133111ebull + k2));
    return RngStream(h);
  }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  uint64_t uniform_int(uint64_t n) {
    // Rejection sampling keeps the distribution exact.
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller (no implementation-defined distributions).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<size_t>(uniform_int(i))]);
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  static uint64_t mix(uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace viewfx

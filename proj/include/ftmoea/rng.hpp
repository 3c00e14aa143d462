#pragma once

#include <cstdint>
#include <random>

namespace ftmoea {

// Thin wrapper over mt19937_64 with fixed draw algorithms, so results do
// not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // Rejection sampling keeps this unbiased.
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(below(n));
  }

  // Uniform in [0, 1).
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Split off an independent stream; used per experiment run.
  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::mt19937_64 mix(master ^ (0x9e3779b97f4a7c15ull * (index + 1)));
    mix.discard(7);
    return mix();
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ftmoea

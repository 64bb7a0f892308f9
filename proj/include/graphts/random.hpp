#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace graphts {

// Deterministic random source. std::mt19937_64 is bit-exact across
// implementations; the standard <random> distributions are not, so every
// mapping from raw engine output is done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // uniform double in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // log-uniform on [lo, hi]; requires 0 < lo <= hi
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  // uniform integer in [0, n), unbiased via rejection
  std::size_t index(std::size_t n) {
    const std::uint64_t m = static_cast<std::uint64_t>(n);
    const std::uint64_t threshold = (0 - m) % m;
    std::uint64_t x = next();
    while (x < threshold) x = next();
    return static_cast<std::size_t>(x % m);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Stream derivation (splitmix64 finalizer). Used to give trajectories,
  // folds, and trials independent seeds so results do not depend on the
  // order in which they are processed.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace graphts

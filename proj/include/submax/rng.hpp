#pragma once

// Deterministic random-number plumbing.
//
// Every randomized component in this library draws from its own named
// stream derived from one master seed, so a run is reproducible end to end
// and adding a new consumer of randomness does not perturb existing ones.
// Distributions are implemented by hand on top of std::mt19937_64 (whose
// output sequence is fully specified by the standard) instead of the
// std::*_distribution classes, whose results may differ across standard
// library implementations.

#include <cassert>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace submax {

// FNV-1a, used to fold stream names into seed material.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// SplitMix64 finalizer; bijective, well-mixed.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Child seed for a named stream. `index` distinguishes replicas of the same
// role (expert 0, expert 1, ..., trial 7, ...).
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t index = 0) {
  return mix64(mix64(master ^ fnv1a64(stream)) + index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    assert(lo <= hi);
    return lo + (hi - lo) * uniform();
  }

  // Uniform on {0, ..., n-1}, unbiased via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::next_below: n must be > 0");
    const std::uint64_t residue = (-n) % n;  // 2^64 mod n
    std::uint64_t x = next_u64();
    while (x < residue) x = next_u64();
    return x % n;
  }

  int uniform_int(int n) { return static_cast<int>(next_below(static_cast<std::uint64_t>(n))); }

  bool bernoulli(double p) { return uniform() < p; }

  // Index draw from non-negative weights (need not be normalized).
  int discrete(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("Rng::discrete: negative weight");
      total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("Rng::discrete: all weights zero");
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

 private:
  std::mt19937_64 engine_;
};

// Convenience: the generator for a named stream under a master seed.
inline Rng stream_rng(std::uint64_t master, std::string_view stream,
                      std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

}  // namespace submax

// Deterministic random number generation.
//
// All stochastic components draw through this header.  The variate
// transforms (uniform, Gaussian, discrete) are written out explicitly
// instead of using <random> distribution classes because the standard
// leaves those implementation-defined; results here are bit-identical
// across standard libraries for a fixed seed.
#ifndef GCNBOUND_RNG_HPP
#define GCNBOUND_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace gcnbound {

// SplitMix64 step: the standard 64-bit finalizer used to decorrelate seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a over a component label, so sub-streams keyed by different labels
// are decorrelated even when their indices collide.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Derive a per-component sub-seed from a master seed.  Mixing the label
// hash and index through two SplitMix64 rounds keeps sub-streams disjoint
// for all practical purposes.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view component,
                                 std::uint64_t index = 0) {
  std::uint64_t state = master ^ fnv1a64(component);
  std::uint64_t first = splitmix64(state);
  state ^= index * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL;
  std::uint64_t second = splitmix64(state);
  return first ^ (second + 0x9E3779B97F4A7C15ULL);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform on [0, 1): top 53 bits of the engine output.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]: needed where log() is applied.
  double uniform_open_zero() { return 1.0 - uniform(); }

  // Standard normal via Box-Muller.  No spare caching: each call consumes
  // exactly two engine outputs, keeping the stream position predictable.
  double gaussian() {
    double u1 = uniform_open_zero();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  // Index draw by CDF inversion over possibly-unnormalized nonnegative
  // weights.  Falls back to the last positive-weight index when rounding
  // pushes u past the accumulated total.
  std::size_t discrete(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("discrete: negative weight");
      total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("discrete: zero total weight");
    double u = uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] > 0.0) last_positive = i;
      acc += weights[i];
      if (u < acc) return i;
    }
    return last_positive;
  }

  // Uniform integer on [lo, hi] by rejection-free scaling (53-bit uniform
  // is exact for the small ranges used here).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
    double span = static_cast<double>(hi - lo + 1);
    auto offset = static_cast<std::int64_t>(uniform() * span);
    if (offset >= hi - lo + 1) offset = hi - lo;  // guard the u ~ 1 edge
    return lo + offset;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gcnbound

#endif  // GCNBOUND_RNG_HPP

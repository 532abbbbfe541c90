#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace wdsgen {

// Deterministic random source. The engine (mt19937_64) and every
// distribution transform below are fully specified, so a seed produces the
// same stream on every platform and compiler.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Inclusive integer range.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi <= lo) return lo;
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1u;
    // Multiply-shift rejection-free mapping; bias is < 2^-53 per draw.
    const auto k = static_cast<std::uint64_t>(uniform01() * static_cast<double>(span));
    return lo + static_cast<std::int64_t>(k >= span ? span - 1 : k);
  }

  // Box-Muller, two uniforms per variate.
  double normal(double mean, double stddev) {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Fisher-Yates; std::shuffle leaves the permutation algorithm unspecified.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  std::mt19937_64 eng_;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Seed derivation used everywhere a master seed fans out into per-item
// streams (scenario index, particle index, epoch index...): mix the master
// seed with the item index through splitmix64. Re-deriving the seed for
// candidate i after an interruption therefore needs no saved engine state.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return detail::splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

}  // namespace wdsgen

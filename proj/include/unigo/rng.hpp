#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace unigo {

// SplitMix64 (Steele, Lea & Flood 2014). 64-bit state, 64-bit output,
// fully specified update so sequences are identical on every platform.
// Streams for different purposes are derived with derive_stream(), which
// hashes (seed, tag...) so graph structure, initial opinions and dynamics
// noise can each be regenerated in isolation.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Box-Muller; consumes two uniforms per call, no cached second value.
  double gaussian(double sigma) {
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    return sigma * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Deterministic sub-stream seed from a base seed and a tag path.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = detail::mix64(base + 0x9E3779B97F4A7C15ULL);
  for (std::uint64_t t : tags) h = detail::mix64(h ^ (t + 0x9E3779B97F4A7C15ULL));
  return h;
}

inline SplitMix64 derive_stream(std::uint64_t base,
                                std::initializer_list<std::uint64_t> tags) {
  return SplitMix64(derive_seed(base, tags));
}

}  // namespace unigo

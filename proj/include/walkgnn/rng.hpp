#pragma once

#include <cstdint>

namespace walkgnn {

// SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom number
// generators", OOPSLA 2014). Chosen over std::mt19937_64 because the whole
// generator, including the double conversion, is a dozen lines that behave
// bit-identically on every platform and in every language a re-implementation
// might live in. All randomized outputs of this library (graphs, weights)
// derive from this generator.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 bits of mantissa.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [-radius, radius).
  double next_symmetric(double radius) {
    return (2.0 * next_double() - 1.0) * radius;
  }

  // Uniform integer in [lo, hi] (inclusive). Modulo bias is irrelevant at the
  // range sizes used here (graph sizes, widths).
  std::uint64_t next_in_range(std::uint64_t lo, std::uint64_t hi) {
    return lo + next_u64() % (hi - lo + 1);
  }

 private:
  std::uint64_t state_;
};

}  // namespace walkgnn

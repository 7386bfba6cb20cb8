#pragma once

#include <cstdint>

namespace lisr {

/* SplitMix64.  Chosen as the project-wide generator because its output is a
   fixed bit-for-bit function of the seed on every platform, unlike the
   std:: distributions.  All randomized generators in this library document
   their draw order in terms of this generator so that runs are reproducible
   from the seed alone. */
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /* Uniform on [0, 1) with 53 random bits. */
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /* The finalizer alone; used to derive stream seeds. */
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/* Independent sub-stream `stream` of a root seed.  Generators that need
   several draw sequences (e.g. matrix entries vs. linear terms) take one
   stream per sequence so inserting draws in one never shifts another. */
inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(SplitMix64::mix(seed + 0x9E3779B97F4A7C15ull * (stream + 1)));
}

}  // namespace lisr

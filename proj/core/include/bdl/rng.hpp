#pragma once

#include <cstdint>

namespace bdl {

/// Counter-based SplitMix64: draw k of stream `seed` is mix(seed + (k + 1) * 0x9E3779B97F4A7C15)
/// with the standard SplitMix64 finalizer. Any language with 64-bit wrapping arithmetic
/// reproduces the sequence bit for bit.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t at(std::uint64_t k) const { return mix(seed_ + (k + 1) * 0x9E3779B97F4A7C15ULL); }

  std::uint64_t next() { return at(counter_++); }

  /// Top 53 bits scaled to [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace bdl

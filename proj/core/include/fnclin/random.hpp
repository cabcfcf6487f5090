#pragma once

#include <cstddef>
#include <cstdint>

namespace fnclin {

/// splitmix64. Integer-only, so every seed yields the same stream on every
/// platform and standard library (unlike <random> distributions).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on [-1, 1).
  double symmetric_unit() { return 2.0 * uniform() - 1.0; }
  /// Uniform index in [0, n); n must be > 0.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

 private:
  std::uint64_t state_;
};

/// Decorrelated child seed for stream `index` of a parent seed.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  SplitMix64 mix(parent ^ (index * 0xd1b54a32d192ed03ULL));
  return mix.next();
}

}  // namespace fnclin

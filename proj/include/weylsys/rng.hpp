#pragma once

#include <cstdint>

namespace weylsys {

/// Counter-based generator: every (stream, index) pair maps to a fixed 64-bit
/// value, so samples can be drawn in any order, on any worker, identically.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const noexcept {
    std::uint64_t z = mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL));
    return mix(z + index * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t stream, std::uint64_t index) const noexcept {
    return static_cast<double>(bits(stream, index) >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [lo, hi], by rejection (unbiased).
  std::int64_t uniform_int(std::uint64_t stream, std::uint64_t index, std::int64_t lo, std::int64_t hi) const noexcept {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(bits(stream, index));
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    for (std::uint64_t attempt = 0;; ++attempt) {
      const std::uint64_t v = bits(stream, index * 64 + attempt);
      if (v < limit) return lo + static_cast<std::int64_t>(v % span);
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace weylsys

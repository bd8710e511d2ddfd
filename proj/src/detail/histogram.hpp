#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "weylsys/arith.hpp"

namespace weylsys::detail {

/// Open-addressing map from fixed-width vectors of 128-bit values to counts.
class ValueHistogram {
 public:
  explicit ValueHistogram(int width, std::size_t expected = 16) : width_(width) { rehash(capacity_for(expected)); }

  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return size_; }

  void add(const i128* key, u128 count) {
    if ((size_ + 1) * 4 > capacity_ * 3) rehash(capacity_ * 2);
    std::size_t slot = hash(key) & (capacity_ - 1);
    while (used_[slot]) {
      if (equal(slot, key)) {
        counts_[slot] += count;
        return;
      }
      slot = (slot + 1) & (capacity_ - 1);
    }
    used_[slot] = 1;
    for (int k = 0; k < width_; ++k) keys_[slot * static_cast<std::size_t>(width_) + k] = key[k];
    counts_[slot] = count;
    ++size_;
  }

  u128 find(const i128* key) const {
    std::size_t slot = hash(key) & (capacity_ - 1);
    while (used_[slot]) {
      if (equal(slot, key)) return counts_[slot];
      slot = (slot + 1) & (capacity_ - 1);
    }
    return 0;
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t slot = 0; slot < capacity_; ++slot)
      if (used_[slot]) fn(&keys_[slot * static_cast<std::size_t>(width_)], counts_[slot]);
  }

  void merge(const ValueHistogram& other) {
    other.for_each([&](const i128* key, u128 count) { add(key, count); });
  }

 private:
  static std::size_t capacity_for(std::size_t expected) {
    std::size_t cap = 16;
    while (cap * 3 < expected * 4) cap *= 2;
    return cap;
  }

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::size_t hash(const i128* key) const {
    std::uint64_t h = 0x51ed270b27a5f3c1ULL;
    for (int k = 0; k < width_; ++k) {
      const auto u = static_cast<u128>(key[k]);
      h = mix(h ^ static_cast<std::uint64_t>(u));
      h = mix(h ^ static_cast<std::uint64_t>(u >> 64));
    }
    return static_cast<std::size_t>(h);
  }

  bool equal(std::size_t slot, const i128* key) const {
    const i128* stored = &keys_[slot * static_cast<std::size_t>(width_)];
    for (int k = 0; k < width_; ++k)
      if (stored[k] != key[k]) return false;
    return true;
  }

  void rehash(std::size_t capacity) {
    std::vector<i128> keys(capacity * static_cast<std::size_t>(width_));
    std::vector<u128> counts(capacity);
    std::vector<std::uint8_t> used(capacity, 0);
    keys.swap(keys_);
    counts.swap(counts_);
    used.swap(used_);
    const std::size_t old_capacity = capacity_;
    capacity_ = capacity;
    size_ = 0;
    for (std::size_t slot = 0; slot < old_capacity; ++slot)
      if (used[slot]) add(&keys[slot * static_cast<std::size_t>(width_)], counts[slot]);
  }

  int width_;
  std::size_t capacity_ = 0;
  std::size_t size_ = 0;
  std::vector<i128> keys_;
  std::vector<u128> counts_;
  std::vector<std::uint8_t> used_;
};

}  // namespace weylsys::detail

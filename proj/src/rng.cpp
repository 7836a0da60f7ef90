// SPDX-License-Identifier: Apache-2.0

#include "molt/rng.hpp"

#include <cmath>
#include <numbers>

namespace molt {

namespace {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
}

inline std::uint64_t hash_purpose(std::uint64_t key, std::string_view purpose) {
  // FNV-1a over the tag, folded into the key.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : purpose) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return mix(key, h);
}

}  // namespace

SplitRng::SplitRng(std::uint64_t seed, std::string_view purpose)
    : key_(hash_purpose(splitmix64(seed), purpose)) {}

SplitRng SplitRng::split(std::string_view purpose) const {
  return SplitRng(hash_purpose(key_, purpose));
}

std::uint64_t SplitRng::next_u64() { return mix(key_, counter_++); }

double SplitRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitRng::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // Box-Muller; u1 shifted away from 0 so log() is finite.
  double u1 = uniform();
  double u2 = uniform();
  u1 = (u1 <= 0.0) ? 0x1.0p-53 : u1;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(t);
  has_cached_normal_ = true;
  return r * std::cos(t);
}

std::uint64_t SplitRng::uniform_index(std::uint64_t n) {
  if (n == 0) return 0;
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % n;
}

double SplitRng::uniform_at(std::uint64_t key, std::uint64_t index) {
  return static_cast<double>(mix(key, index) >> 11) * 0x1.0p-53;
}

std::uint64_t derive_key(std::uint64_t seed, std::string_view purpose,
                         std::uint64_t index) {
  return mix(hash_purpose(splitmix64(seed), purpose), index);
}

}  // namespace molt

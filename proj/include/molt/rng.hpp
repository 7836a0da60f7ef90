// SPDX-License-Identifier: Apache-2.0

#ifndef MOLT_RNG_HPP_
#define MOLT_RNG_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

namespace molt {

// Splittable counter-based generator. Every stream is keyed by
// (seed, purpose tag); draws are a pure hash of (key, counter), so results
// do not depend on thread interleaving or call-site ordering elsewhere.
class SplitRng {
 public:
  SplitRng(std::uint64_t seed, std::string_view purpose);

  // Derive an independent sub-stream; the child counter starts at zero.
  SplitRng split(std::string_view purpose) const;

  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double normal();   // standard normal, Box-Muller

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  template <class T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i + 1));
      std::swap(v[i], v[j]);
    }
  }

  std::uint64_t key() const { return key_; }

  // Stateless draw used by dropout masks: pure function of (key, index).
  static double uniform_at(std::uint64_t key, std::uint64_t index);

 private:
  SplitRng(std::uint64_t key) : key_(key) {}

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// Derive a dropout/stream key from (seed, purpose, index) without
// constructing a full stream object.
std::uint64_t derive_key(std::uint64_t seed, std::string_view purpose,
                         std::uint64_t index = 0);

}  // namespace molt

#endif  // MOLT_RNG_HPP_

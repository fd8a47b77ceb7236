#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace negaff {

// Unbiased draw in [0, bound) via rejection. std::uniform_int_distribution
// is implementation-defined; this keeps sampled outputs identical across
// standard libraries, which the replayable-manifest contract relies on.
inline uint64_t uniform_below(std::mt19937_64& rng, uint64_t bound) {
  if (bound < 2) return 0;
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

// Deterministic Fisher-Yates; shuffles the first `count` slots fully when
// count < size (partial shuffle for sampling without replacement).
template <typename T>
void partial_shuffle(std::vector<T>& items, size_t count, std::mt19937_64& rng) {
  const size_t n = items.size();
  for (size_t i = 0; i < count && i + 1 < n; ++i) {
    const size_t j = i + static_cast<size_t>(uniform_below(rng, n - i));
    std::swap(items[i], items[j]);
  }
}

}  // namespace negaff

#pragma once

// Bitmask subset utilities. User subsets T and BS subsets S are encoded as
// bitmasks with bit i representing index i (0-based). Enumeration is always
// lexicographic by bitmask value so constraint tables are stable across runs.

#include <bit>
#include <cstdint>
#include <vector>

namespace cran {

using Mask = std::uint32_t;

inline int mask_size(Mask m) { return std::popcount(m); }

inline Mask full_mask(int n) { return (n >= 32) ? ~Mask(0) : ((Mask(1) << n) - 1); }

inline bool mask_contains(Mask m, int i) { return (m >> i) & 1u; }

/// Indices present in the mask, ascending.
inline std::vector<int> mask_indices(Mask m) {
  std::vector<int> out;
  for (int i = 0; m >> i; ++i)
    if ((m >> i) & 1u) out.push_back(i);
  return out;
}

}  // namespace cran

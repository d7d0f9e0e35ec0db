// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "lsth/rng.hpp"

namespace lsth {

uint64_t mix64(uint64_t seed, uint64_t counter) {
  uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

uint64_t mix64_below(uint64_t seed, uint64_t counter, uint64_t n) {
  // Multiply-shift reduction; bias is negligible for desk-scale n.
  unsigned __int128 m = static_cast<unsigned __int128>(mix64(seed, counter)) * n;
  return static_cast<uint64_t>(m >> 64);
}

}  // namespace lsth

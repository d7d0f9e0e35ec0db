// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <vector>

namespace lsth {

// Counter-based deterministic generator: the value at (seed, counter) is
// splitmix64(seed + (counter + 1) * 0x9E3779B97F4A7C15). Stateless, so any
// stream index can be computed independently and results are identical
// across platforms and implementations. This is the pinned PRNG for datagen
// and for the deterministic shuffle used by throughput-stream permutations.
uint64_t mix64(uint64_t seed, uint64_t counter);

// Uniform integer in [0, n) drawn from (seed, counter); n must be > 0.
uint64_t mix64_below(uint64_t seed, uint64_t counter, uint64_t n);

// Stateful convenience wrapper around the counter-based generator.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed) {}
  uint64_t next() { return mix64(seed_, counter_++); }
  uint64_t below(uint64_t n) { return mix64_below(seed_, counter_++, n); }
  int64_t range(int64_t lo, int64_t hi) {  // inclusive bounds
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
  }

 private:
  uint64_t seed_;
  uint64_t counter_ = 0;
};

// Fisher-Yates shuffle keyed by `seed`; deterministic for a given (seed, n).
template <typename T>
void deterministic_shuffle(std::vector<T>& items, uint64_t seed) {
  Rng rng(seed);
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace lsth

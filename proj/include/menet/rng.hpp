#pragma once

#include <cstdint>

namespace menet::rng {

// Counter-based generator built on the SplitMix64 finalizer
// (Steele, Lea, Flood 2014). Every draw is a pure function of
// (seed, stream, counter), so sampling is reproducible and
// trivially shareable across threads.

uint64_t splitmix64(uint64_t x);

// Combine a seed with a stream id into a keyed state.
uint64_t key(uint64_t seed, uint64_t stream);

// Uniform double in (0, 1), never exactly 0 or 1.
double uniform01(uint64_t seed, uint64_t stream, uint64_t counter);

// Standard normal via Box-Muller on counters (2c, 2c+1).
double normal(uint64_t seed, uint64_t stream, uint64_t counter);

// Uniform in [lo, hi].
double uniform(uint64_t seed, uint64_t stream, uint64_t counter,
               double lo, double hi);

}  // namespace menet::rng

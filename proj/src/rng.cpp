#include "menet/rng.hpp"

#include <cmath>
#include <numbers>

namespace menet::rng {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

uint64_t key(uint64_t seed, uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ (stream * 0xD6E8FEB86659FD93ull));
}

double uniform01(uint64_t seed, uint64_t stream, uint64_t counter) {
    uint64_t bits = splitmix64(key(seed, stream) + counter * 0xA0761D6478BD642Full);
    // 53 random bits, offset by half an ulp so the result is in (0,1)
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double normal(uint64_t seed, uint64_t stream, uint64_t counter) {
    double u1 = uniform01(seed, stream, 2 * counter);
    double u2 = uniform01(seed, stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

double uniform(uint64_t seed, uint64_t stream, uint64_t counter,
               double lo, double hi) {
    return lo + (hi - lo) * uniform01(seed, stream, counter);
}

}  // namespace menet::rng

// Seeded random streams. Every experiment cell derives its own engine from
// (seed, purpose, cell) so results do not depend on scheduling or job count,
// and reruns with the same config are byte-identical.
#pragma once

#include <cstdint>
#include <random>

#include "numbers.hpp"

namespace ssmix {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Mix a seed with up to two stream coordinates into one engine seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t purpose, uint64_t cell = 0) {
    uint64_t s = seed;
    uint64_t a = splitmix64(s);
    s ^= purpose * 0xd1342543de82ef95ull;
    uint64_t b = splitmix64(s);
    s ^= cell * 0xaf251af3b0f025b5ull;
    uint64_t c = splitmix64(s);
    return a ^ (b + 0x9e3779b97f4a7c15ull + (c << 6) + (c >> 2));
}

using Rng = std::mt19937_64;

inline Rng make_stream(uint64_t seed, uint64_t purpose, uint64_t cell = 0) {
    return Rng(mix_seed(seed, purpose, cell));
}

// Stream purposes; keep values stable, they are part of reproducibility.
enum : uint64_t {
    kStreamGnp = 1,
    kStreamCorpus = 2,
    kStreamPairs = 3,
    kStreamGlauber = 4,
    kStreamLists = 5,
};

// Unbiased uniform draw from [0, n). Hand-rolled so results do not depend on
// the standard library's distribution implementations.
inline uint64_t uniform_below(Rng& rng, uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
        x = rng();
    } while (x >= lim);
    return x % n;
}

// Uniform double in the open interval (0, 1); never returns 0 so it is safe
// under log().
inline double uniform_open01(Rng& rng) {
    double u;
    do {
        u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    } while (u == 0.0);
    return u;
}

// Uniform BigInt in [0, n), n > 0, by rejection on the top word.
inline BigInt uniform_bigint_below(Rng& rng, const BigInt& n) {
    if (n <= 1) return 0;
    const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(n)) + 1;
    const unsigned words = (bits + 63) / 64;
    const unsigned top_bits = bits - (words - 1) * 64;
    const uint64_t top_mask = top_bits == 64 ? UINT64_MAX : ((uint64_t{1} << top_bits) - 1);
    while (true) {
        BigInt x = 0;
        for (unsigned w = 0; w < words; ++w) {
            uint64_t word = rng();
            if (w + 1 == words) word &= top_mask;
            x |= BigInt(word) << (64 * w);
        }
        if (x < n) return x;
    }
}

}  // namespace ssmix

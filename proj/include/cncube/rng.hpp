#pragma once

#include <cstdint>

namespace cnc {

// Deterministic 64-bit generator (splitmix64). Used instead of
// <random> engines plus distributions so that streams are bit-identical
// across platforms and standard library versions.
struct SplitMix64 {
    uint64_t state = 0;

    SplitMix64() = default;
    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint32_t next32() { return static_cast<uint32_t>(next() >> 32); }

    // Uniform in [0, bound). bound must be > 0.
    uint32_t below(uint32_t bound) {
        return static_cast<uint32_t>(
            (static_cast<uint64_t>(next32()) * bound) >> 32);
    }

    bool coin() { return (next() & 1) != 0; }
};

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace cnc

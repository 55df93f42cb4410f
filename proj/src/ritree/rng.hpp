#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ritree::rng {

// splitmix64 finalizer; also the stepping function of the seed sequence.
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over the label bytes, folded with the root seed and a counter.
// Every random decision in the library draws from a stream derived this
// way, so a single root seed replays the full pipeline.
inline std::uint64_t derive(std::uint64_t root, std::string_view label,
                            std::uint64_t counter = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    h ^= mix(root);
    h ^= mix(counter + 0x853c49e6748fea9bULL);
    return mix(h);
}

inline std::mt19937_64 engine(std::uint64_t seed) {
    return std::mt19937_64(mix(seed));
}

}  // namespace ritree::rng

// Counter-based seeding. Every random draw in the project comes from a
// stream keyed by (seed, purpose label, counters), so draws for one purpose
// never depend on how many draws another purpose made.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vcsim {

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, std::string_view label,
                                   std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t k = splitmix64(seed ^ fnv1a64(label));
    k = splitmix64(k ^ a);
    k = splitmix64(k ^ (b + 0x632be59bd9b4e019ULL));
    return k;
}

using Engine = std::mt19937_64;

inline Engine make_stream(std::uint64_t seed, std::string_view label,
                          std::uint64_t a = 0, std::uint64_t b = 0) {
    return Engine(derive_key(seed, label, a, b));
}

// Uniform double in [0, 1) using the top 53 bits; stable across standard
// library implementations, unlike std::uniform_real_distribution.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % n;
}

} // namespace vcsim

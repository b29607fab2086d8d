#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gema {

using Rng = std::mt19937_64;

// Seed used whenever a run does not pass one explicitly.
inline constexpr std::uint64_t kDefaultSeed = 20240601;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a; stable across platforms, unlike std::hash.
inline std::uint64_t stream_tag(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/*
 * Derives an independent generator from a run seed. Each module draws from
 * its own named stream, and parallel loops split further by item index so
 * that results do not depend on thread scheduling.
 */
inline Rng make_stream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
    return Rng(splitmix64(splitmix64(seed ^ stream_tag(name)) + index));
}

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace gema

#pragma once

#include <cstdint>
#include <random>

namespace adfslam::bench {

/// Named sub-streams so corruption draws never perturb scenario noise.
enum class RngStream : std::uint64_t {
    kScenario = 0x5c3a1e4b,
    kSwap = 0x9d2f7a11,
    kInitNoise = 0x3b8c55e7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent deterministic generator for (seed, stream).
inline std::mt19937_64 derive_rng(std::uint64_t seed, RngStream stream) {
    const std::uint64_t h = splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream));
    return std::mt19937_64(h);
}

}  // namespace adfslam::bench

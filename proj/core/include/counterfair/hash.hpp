#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace counterfair {

// 64-bit FNV-1a. Used for plan fingerprints and derived RNG seeds; stable
// across platforms and runs by construction.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Final avalanche step of splitmix64; decorrelates seeds that differ in few bits.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d4a9fa79c3e6adull;
    return x ^ (x >> 31);
}

/// Combine a numeric seed with string parts into one derived 64-bit seed.
/// Parts are length-delimited so ("ab","c") and ("a","bc") differ.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::string_view> parts) {
    std::uint64_t h = fnv1a64(std::string_view(reinterpret_cast<const char*>(&seed), sizeof seed));
    for (auto part : parts) {
        std::uint64_t n = part.size();
        h = fnv1a64(std::string_view(reinterpret_cast<const char*>(&n), sizeof n), h);
        h = fnv1a64(part, h);
    }
    return mix64(h);
}

/// Unbiased-enough bounded draw (Lemire multiply-shift). Avoids
/// std::uniform_int_distribution, whose output is not pinned by the standard.
inline std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace counterfair

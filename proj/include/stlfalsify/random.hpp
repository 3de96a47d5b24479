#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace stlf {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent generator for a (seed, key...) tuple.
inline Rng derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = mix64(seed);
    for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    return Rng(h);
}

template <class URBG>
double uniform01(URBG& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

template <class URBG>
std::size_t uniform_index(std::size_t n, URBG& rng) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace stlf

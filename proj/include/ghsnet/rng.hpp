#pragma once

#include <cstdint>
#include <random>

namespace ghs {

// std::mt19937_64 is specified bit-exactly by the standard; distributions are
// taken from Boost.Random wherever values must be reproducible across platforms.
using Rng = std::mt19937_64;

/// splitmix64 finaliser, used to derive independent streams from one seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum class Stream : std::uint64_t {
    Graph = 1,
    Precision = 2,
    Perturb = 3,
    Sample = 4,
    Bootstrap = 5,
    Scores = 6,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
    return Rng(mix_seed(mix_seed(seed) ^ static_cast<std::uint64_t>(stream)));
}

} // namespace ghs

#pragma once

#include <cstdint>
#include <random>

namespace hetsched {

// Uniform draw in the open interval (0,1), built directly from the raw
// 64-bit engine output. std::uniform_real_distribution is implementation
// defined, so sequences would differ across standard libraries; scenario
// regeneration has to be bit-exact for a given seed.
inline double uniform_unit(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

// SplitMix64 finalizer. Derives independent per-stream seeds from a master
// seed; stream 0 with index i is used for Monte Carlo instance i.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace hetsched

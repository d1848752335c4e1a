// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "irsofdm/numerics.hpp"

namespace irsofdm {

using Rng = std::mt19937_64;

/// Independent sub-stream purposes within one realization.
enum class Stream : std::uint64_t {
    channel = 1,
    training_noise = 2,
    initializer = 3,
    random_phase = 4,
    mse = 5,
    combined_pilot = 6,  // single-pilot training of the random-phase benchmark
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of realization `index` under scenario seed `seed`.
constexpr std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
    return mix64(mix64(seed) ^ (index * 0xd1342543de82ef95ULL + 1));
}

inline Rng make_stream(std::uint64_t realization_seed, Stream s)
{
    return Rng(mix64(realization_seed ^ mix64(static_cast<std::uint64_t>(s))));
}

/// CN(0, variance) sample.
inline cplx complex_gaussian(Rng& rng, double variance)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    const double s = std::sqrt(variance / 2.0);
    const double re = nd(rng);
    const double im = nd(rng);
    return {s * re, s * im};
}

inline double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace irsofdm

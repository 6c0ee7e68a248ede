#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace tti {

// mt19937_64 output is fixed by the standard; the distribution helpers below
// are written out so that streams are reproducible across standard libraries.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Combines a base seed with an ordered list of stream identifiers.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) noexcept;

/// Uniform double in [0, 1) with 53 bits of precision.
double uniform01(Rng& rng);

/// Uniform double in [0, 1) computed statelessly from a 64-bit key.
double hash_uniform01(std::uint64_t key) noexcept;

/// Unbiased uniform index in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Draws an index with probability proportional to weights[i]. Weights must be
/// nonnegative with a positive sum.
std::size_t sample_weighted(Rng& rng, std::span<const double> weights);

template <class T>
void shuffle(std::span<T> values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = uniform_index(rng, i);
        std::swap(values[i - 1], values[j]);
    }
}

} // namespace tti

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

// Deterministic, portable random number generation. Every stochastic step in
// the toolkit (train/test shuffling, bootstrap draws, per-node feature
// subsets) goes through these generators so that a given seed produces
// bit-identical results on any platform. std::mt19937 plus std::shuffle is
// deliberately avoided: the standard leaves the shuffle algorithm
// unspecified, which breaks cross-implementation reproducibility.

namespace fswml {

/// splitmix64 (Steele, Lea, Flood). Used to expand a single 64-bit seed into
/// generator state and to derive independent per-tree seed chains.
class SplitMix64 {
public:
    constexpr explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256** (Blackman, Vigna), seeded via splitmix64.
class Xoshiro256StarStar {
public:
    explicit Xoshiro256StarStar(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : state_) {
            word = sm.next();
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform draw in [0, bound) via the fixed-point multiply reduction
    /// (Lemire). The mapping is fully defined, so sequences are portable.
    std::uint64_t next_below(std::uint64_t bound) {
        using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<u128>(next()) * bound) >> 64);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

/// In-place Fisher-Yates shuffle with a pinned draw order (i = n-1 .. 1),
/// so the permutation for a given seed is part of the file/report contract.
template <typename T>
void fisher_yates_shuffle(std::span<T> values, Xoshiro256StarStar& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(values[i - 1], values[j]);
    }
}

/// First k entries of a seeded permutation of {0..n-1}, ascending.
/// Used for per-node candidate-feature subsets in forests.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                           Xoshiro256StarStar& rng) {
    if (k > n) {
        k = n;
    }
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) {
        pool[i] = i;
    }
    // Partial Fisher-Yates from the front: k draws settle positions 0..k-1.
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace fswml

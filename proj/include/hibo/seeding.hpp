#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hibo {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives child seeds from a master seed and a path of integers
/// (restart ordinal, iteration, purpose tag, ...). Every random decision in
/// the optimizer draws from its own derived stream, so two algorithm
/// variants that share a decision consume identical random numbers
/// regardless of what else runs between them.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t p : path) {
        s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    }
    return s;
}

/// Stream tags used when deriving per-iteration seeds.
enum class SeedPurpose : std::uint64_t {
    initial_sample = 1,
    gp_fit = 2,
    candidates = 3,
    thompson = 4,
    kmeans = 5,
    random_search = 6,
    landscape = 7,
    restricted_retry = 8,
    permutation = 9,
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t restart,
                                 std::uint64_t iteration, SeedPurpose purpose,
                                 std::uint64_t extra = 0) {
    return derive_seed(master, {restart, iteration,
                                static_cast<std::uint64_t>(purpose), extra});
}

using Rng = std::mt19937_64;

}  // namespace hibo

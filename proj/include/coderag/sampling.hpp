#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace coderag {

/// Seeded generator whose output is identical across standard libraries:
/// std::mt19937_64 is fully specified, and bounded draws use our own
/// rejection sampling instead of std::uniform_int_distribution.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

/// Independent seed for a numbered stream (splitmix64 of both inputs).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded permutation of 0..n-1 (Fisher-Yates).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

/// k distinct indices drawn uniformly from 0..n-1, in draw order.
/// Requires k <= n.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, std::uint64_t seed);

} // namespace coderag

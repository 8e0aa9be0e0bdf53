#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lemmabench {

/// Permutation of 0..n-1 that depends only on (n, seed). Draws come from
/// std::mt19937_64, whose output sequence is fixed by the standard; the
/// bounded draw is done here so results do not vary between standard
/// library implementations.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

/// `k` distinct indices out of 0..n-1, in ascending order.
std::vector<std::size_t> seeded_sample(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace lemmabench

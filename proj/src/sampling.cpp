#include "lemmabench/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <limits>
#include <random>

namespace lemmabench {

namespace {

// Uniform draw from [0, bound) by rejection.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(bounded(rng, i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::vector<std::size_t> seeded_sample(std::size_t n, std::size_t k, std::uint64_t seed) {
  auto order = seeded_permutation(n, seed);
  order.resize(std::min(k, n));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace lemmabench

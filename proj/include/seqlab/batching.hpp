#pragma once

#include <cstdint>
#include <vector>

#include "seqlab/common.hpp"
#include "seqlab/rng.hpp"

namespace seqlab {

// One epoch of batches over [0, n): a seeded permutation cut into batch_size
// slices, last batch possibly short. Every index appears exactly once.
inline std::vector<std::vector<std::size_t>> make_batches(std::size_t n,
                                                          std::size_t batch_size,
                                                          std::uint64_t shuffle_seed) {
  require(batch_size >= 1, "make_batches: batch size must be >= 1");
  Rng rng(shuffle_seed);
  std::vector<std::size_t> order = rng.permutation(n);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < n; i += batch_size) {
    std::size_t end = std::min(n, i + batch_size);
    batches.emplace_back(order.begin() + i, order.begin() + end);
  }
  return batches;
}

}  // namespace seqlab

#pragma once

#include <numeric>
#include <vector>

#include "physarum/types.hpp"

namespace physarum {

/// Calls fn(indices) for every k-subset of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_combination(Index n, Index k, Fn&& fn) {
  if (k < 0 || k > n) return;
  std::vector<Index> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (;;) {
    fn(static_cast<const std::vector<Index>&>(idx));
    Index j = k - 1;
    while (j >= 0 && idx[j] == n - k + j) --j;
    if (j < 0) return;
    ++idx[j];
    for (Index t = j + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
}

}  // namespace physarum

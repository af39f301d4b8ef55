#pragma once

#include <cstddef>
#include <utility>

namespace pathnnt {

/// Pairwise (tree) reduction of term(lo), ..., term(hi-1).
///
/// The tree shape is a fixed function of the range, so the result is
/// identical no matter how many threads computed the leaves or how often
/// the reduction is repeated.
template <class T, class F>
T pairwise_sum(std::size_t lo, std::size_t hi, T zero, F&& term) {
  constexpr std::size_t kLeaf = 32;
  if (hi - lo <= kLeaf) {
    T acc = std::move(zero);
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  T left = pairwise_sum(lo, mid, zero, term);
  T right = pairwise_sum(mid, hi, std::move(zero), term);
  left += right;
  return left;
}

template <class F>
double pairwise_sum_d(std::size_t n, F&& term) {
  if (n == 0) return 0.0;
  return pairwise_sum(0, n, 0.0, std::forward<F>(term));
}

}  // namespace pathnnt

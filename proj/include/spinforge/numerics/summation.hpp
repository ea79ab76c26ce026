#pragma once

#include <cstddef>
#include <span>

namespace spinforge {

/// Pairwise sum in fixed index order; T needs copy and operator+.
template <class T>
T pairwise_sum(std::span<const T> xs) {
  if (xs.size() == 1) return xs[0];
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace spinforge

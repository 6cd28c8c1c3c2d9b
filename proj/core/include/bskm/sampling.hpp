#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "bskm/types.hpp"

namespace bskm {

using Rng = std::mt19937_64;

/// Draws uniformly random row subsets without replacement.
///
/// Keeps a permutation of [0, m) across calls; each draw is a partial
/// Fisher–Yates shuffle of its first entries, O(size) per draw. Any starting
/// arrangement yields uniform draws, so the buffer is never reset.
class RowSampler {
 public:
  explicit RowSampler(Index m);

  [[nodiscard]] Index rows() const noexcept { return static_cast<Index>(perm_.size()); }

  /// `count` distinct rows, uniform over all (m choose count) subsets.
  /// The returned view is valid until the next draw.
  std::span<const Index> draw(Index count, Rng& rng);

  /// `groups` mutually disjoint samples of `group_size` rows each, laid out
  /// consecutively: sample j is [j*group_size, (j+1)*group_size). Uniform over
  /// ordered tuples of disjoint subsets.
  std::span<const Index> draw_disjoint(Index groups, Index group_size, Rng& rng);

 private:
  std::vector<Index> perm_;
};

/// Sorted sample of `beta` distinct rows out of m.
[[nodiscard]] IndexSet sample_uniform(Index m, Index beta, Rng& rng);

}  // namespace bskm

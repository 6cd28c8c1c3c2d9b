#include "bskm/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "bskm/errors.hpp"

namespace bskm {

RowSampler::RowSampler(Index m) {
  if (m < 1) throw ContractViolation("RowSampler: need at least one row");
  perm_.resize(static_cast<std::size_t>(m));
  std::iota(perm_.begin(), perm_.end(), Index{0});
}

std::span<const Index> RowSampler::draw(Index count, Rng& rng) {
  const Index m = rows();
  if (count < 1 || count > m) {
    throw ContractViolation("sample size " + std::to_string(count) + " outside [1, " +
                            std::to_string(m) + "]");
  }
  for (Index k = 0; k < count; ++k) {
    std::uniform_int_distribution<Index> pick(k, m - 1);
    std::swap(perm_[k], perm_[pick(rng)]);
  }
  return {perm_.data(), static_cast<std::size_t>(count)};
}

std::span<const Index> RowSampler::draw_disjoint(Index groups, Index group_size, Rng& rng) {
  if (groups < 1 || group_size < 1) {
    throw ContractViolation("disjoint sampling needs positive group count and size");
  }
  if (groups * group_size > rows()) {
    throw ContractViolation("disjoint sampling: " + std::to_string(groups) + " groups of " +
                            std::to_string(group_size) + " exceed " + std::to_string(rows()) +
                            " rows");
  }
  return draw(groups * group_size, rng);
}

IndexSet sample_uniform(Index m, Index beta, Rng& rng) {
  if (m < 1 || beta < 1 || beta > m) {
    throw ContractViolation("sample_uniform: need 1 <= beta <= m");
  }
  RowSampler sampler(m);
  const auto drawn = sampler.draw(beta, rng);
  IndexSet out(drawn.begin(), drawn.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bskm

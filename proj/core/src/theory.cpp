#include "bskm/theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "bskm/errors.hpp"

namespace bskm {

namespace {

// Visits every k-subset of `pool` in lexicographic order of positions.
void for_each_combination(std::span<const Index> pool, Index k,
                          const std::function<void(std::span<const Index>)>& visit) {
  const Index n = static_cast<Index>(pool.size());
  if (k < 1 || k > n) return;
  std::vector<Index> pos(static_cast<std::size_t>(k));
  std::iota(pos.begin(), pos.end(), Index{0});
  IndexSet chosen(static_cast<std::size_t>(k));
  while (true) {
    for (Index j = 0; j < k; ++j) chosen[j] = pool[pos[j]];
    visit(chosen);
    Index j = k - 1;
    while (j >= 0 && pos[j] == n - k + j) --j;
    if (j < 0) return;
    ++pos[j];
    for (Index l = j + 1; l < k; ++l) pos[l] = pos[l - 1] + 1;
  }
}

// Visits every ordered tuple of `groups` disjoint `group_size`-subsets of
// [0, m); the tuple arrives concatenated.
void for_each_disjoint_tuple(Index m, Index groups, Index group_size,
                             const std::function<void(std::span<const Index>)>& visit) {
  IndexSet tuple;
  std::vector<char> used(static_cast<std::size_t>(m), 0);
  std::function<void(Index)> recurse = [&](Index level) {
    if (level == groups) {
      visit(tuple);
      return;
    }
    IndexSet pool;
    for (Index i = 0; i < m; ++i) {
      if (!used[i]) pool.push_back(i);
    }
    for_each_combination(pool, group_size, [&](std::span<const Index> subset) {
      for (const Index i : subset) {
        used[i] = 1;
        tuple.push_back(i);
      }
      recurse(level + 1);
      for (const Index i : subset) used[i] = 0;
      tuple.resize(tuple.size() - subset.size());
    });
  };
  recurse(0);
}

void check_guard(double count, double limit, const std::string& what) {
  if (count > limit) {
    std::ostringstream msg;
    msg << what << ": exact enumeration needs " << count << " samples, above the limit of "
        << limit << "; reduce m or the sample size";
    throw EnumerationLimitExceeded(count, limit, msg.str());
  }
}

Vector residual_of(const MatrixStore& A, const Vector& b, const Vector& x) {
  if (b.size() != A.rows() || x.size() != A.cols()) {
    throw ContractViolation("dimension mismatch between A, b and x");
  }
  return b - A.multiply(x);
}

double lambda_max_of(const MatrixStore& A, std::span<const Index> rows) {
  return gram_extreme_eigs(A.gather_rows(rows)).lambda_max;
}

double tuple_count(Index m, Index groups, Index group_size) {
  double count = 1.0;
  for (Index j = 0; j < groups; ++j) count *= binomial(m - j * group_size, group_size);
  return count;
}

}  // namespace

double binomial(Index n, Index k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double out = 1.0;
  for (Index i = 1; i <= k; ++i) {
    out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(out);
}

double xi_exact(const MatrixStore& A, const Vector& b, const Vector& x, Index beta, double limit) {
  const Index m = A.rows();
  if (beta < 1 || beta > m) throw ContractViolation("xi_exact: beta outside [1, m]");
  check_guard(binomial(m, beta), limit, "xi_exact");
  const Vector r = residual_of(A, b, x);
  if (r.cwiseAbs().maxCoeff() == 0.0) {
    throw UndefinedQuantity("xi_exact: zero residual, the ratio is undefined");
  }
  IndexSet all(static_cast<std::size_t>(m));
  std::iota(all.begin(), all.end(), Index{0});
  double two_norms = 0.0;
  double inf_norms = 0.0;
  for_each_combination(all, beta, [&](std::span<const Index> tau) {
    double sum = 0.0;
    double peak = 0.0;
    for (const Index i : tau) {
      const double sq = r[i] * r[i];
      sum += sq;
      peak = std::max(peak, sq);
    }
    two_norms += sum;
    inf_norms += peak;
  });
  return two_norms / inf_norms;
}

double theorem2_factor(const MatrixStore& A, std::span<const Index> block, double xi, Index beta) {
  IndexSet all(static_cast<std::size_t>(A.rows()));
  std::iota(all.begin(), all.end(), Index{0});
  return theorem2_factor(A, gram_extreme_eigs(A.gather_rows(all)), block, xi, beta);
}

double theorem2_factor(const MatrixStore& A, const SpectralSummary& full,
                       std::span<const Index> block, double xi, Index beta) {
  if (block.empty()) throw ContractViolation("theorem2_factor: empty index set");
  if (!(xi >= 1.0)) throw ContractViolation("theorem2_factor: xi must be at least 1");
  const double size_ratio = static_cast<double>(block.size()) / static_cast<double>(A.rows());
  return 1.0 - (static_cast<double>(beta) / xi) * size_ratio *
                   (full.lambda_min_pos / lambda_max_of(A, block));
}

double theorem3_factor(const MatrixStore& A, std::span<const Index> block,
                       std::span<const Index> tau_h, Index eta) {
  if (block.empty() || tau_h.empty()) {
    throw ContractViolation("theorem3_factor: empty index set");
  }
  const double lambda_min_tau = gram_extreme_eigs(A.gather_rows(tau_h)).lambda_min_pos;
  return 1.0 - static_cast<double>(eta) * lambda_min_tau /
                   (static_cast<double>(tau_h.size()) * lambda_max_of(A, block));
}

std::vector<SampleBound> verify_theorem2_per_sample(const MatrixStore& A, const Vector& b,
                                                    const Vector& x, const Vector& x_star,
                                                    Index beta, double limit) {
  const Index m = A.rows();
  if (beta < 1 || beta > m) throw ContractViolation("verify_theorem2_per_sample: beta outside [1, m]");
  check_guard(binomial(m, beta), limit, "verify_theorem2_per_sample");
  const Vector r = residual_of(A, b, x);
  const double error_sq = (x - x_star).squaredNorm();
  const double xi = r.cwiseAbs().maxCoeff() > 0.0 ? xi_exact(A, b, x, beta, limit) : 1.0;
  IndexSet all(static_cast<std::size_t>(m));
  std::iota(all.begin(), all.end(), Index{0});
  const SpectralSummary full = gram_extreme_eigs(A.gather_rows(all));

  std::vector<SampleBound> out;
  for_each_combination(all, beta, [&](std::span<const Index> tau) {
    SampleBound s;
    s.sample.assign(tau.begin(), tau.end());
    const Violation v = argmax_violation(r, tau);
    s.block = bskm1_build_index_set(r, tau, v);
    Vector next = x;
    project_onto_block(A, b, next, s.block);
    const double lambda_max = lambda_max_of(A, s.block);
    s.lhs = (next - x_star).squaredNorm();
    s.rhs = error_sq - static_cast<double>(s.block.size()) / lambda_max * v.delta;
    s.factor = theorem2_factor(A, full, s.block, xi, beta);
    out.push_back(std::move(s));
  });
  return out;
}

std::vector<SampleBound> verify_theorem3_per_sample(const MatrixStore& A, const Vector& b,
                                                    const Vector& x, const Vector& x_star,
                                                    Index eta, Index beta_j, double limit) {
  const Index m = A.rows();
  if (eta < 1 || beta_j < 1 || eta * beta_j > m) {
    throw ContractViolation("verify_theorem3_per_sample: need eta, beta_j >= 1 and eta*beta_j <= m");
  }
  check_guard(tuple_count(m, eta, beta_j), limit, "verify_theorem3_per_sample");
  const Vector r = residual_of(A, b, x);
  const double error_sq = (x - x_star).squaredNorm();

  std::vector<SampleBound> out;
  for_each_disjoint_tuple(m, eta, beta_j, [&](std::span<const Index> tuple) {
    SampleBound s;
    s.sample.assign(tuple.begin(), tuple.end());
    double violation_sum = 0.0;
    double weakest = std::numeric_limits<double>::infinity();
    std::span<const Index> tau_h;
    for (Index j = 0; j < eta; ++j) {
      const auto group = tuple.subspan(static_cast<std::size_t>(j * beta_j),
                                       static_cast<std::size_t>(beta_j));
      const Violation v = argmax_violation(r, group);
      s.block.push_back(v.row);
      violation_sum += v.delta;
      if (v.delta < weakest) {
        weakest = v.delta;
        tau_h = group;
      }
    }
    std::sort(s.block.begin(), s.block.end());
    Vector next = x;
    project_onto_block(A, b, next, s.block);
    s.lhs = (next - x_star).squaredNorm();
    s.rhs = error_sq - violation_sum / lambda_max_of(A, s.block);
    s.factor = theorem3_factor(A, s.block, tau_h, eta);
    out.push_back(std::move(s));
  });
  return out;
}

ExpectedContraction expected_contraction_exact(Method method, const MatrixStore& A, const Vector& b,
                                               const Vector& x, const Vector& x_star,
                                               const ContractionParams& params, double limit) {
  std::vector<SampleBound> samples;
  if (method == Method::bskm1) {
    samples = verify_theorem2_per_sample(A, b, x, x_star, params.beta, limit);
  } else if (method == Method::bskm2) {
    samples = verify_theorem3_per_sample(A, b, x, x_star, params.eta, params.beta_j, limit);
  } else {
    throw ContractViolation("expected_contraction_exact: only bskm1 and bskm2 carry a bound");
  }
  ExpectedContraction out;
  out.error_sq = (x - x_star).squaredNorm();
  out.samples = static_cast<Index>(samples.size());
  out.worst_factor = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (const auto& s : samples) {
    total += s.lhs;
    out.worst_factor = std::max(out.worst_factor, s.factor);
  }
  out.expected_lhs = total / static_cast<double>(samples.size());
  out.bound_rhs = out.worst_factor * out.error_sq;
  return out;
}

}  // namespace bskm

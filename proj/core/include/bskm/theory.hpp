#pragma once

#include <vector>

#include "bskm/dense_kernels.hpp"
#include "bskm/matrix_store.hpp"
#include "bskm/solvers.hpp"
#include "bskm/types.hpp"

namespace bskm {

/// Largest number of samples (subsets or ordered disjoint tuples) any exact
/// enumeration below will visit.
inline constexpr double kEnumerationLimit = 1e6;

/// n choose k as a double (exact for the sizes the guard admits).
[[nodiscard]] double binomial(Index n, Index k);

/// Σ_τ ‖A_τx − b_τ‖₂² / Σ_τ ‖A_τx − b_τ‖∞² over all size-β subsets τ.
///
/// Throws EnumerationLimitExceeded when (m choose β) exceeds `limit`, and
/// UndefinedQuantity when the residual vanishes.
[[nodiscard]] double xi_exact(const MatrixStore& A, const Vector& b, const Vector& x, Index beta,
                              double limit = kEnumerationLimit);

/// 1 − (β/ξ)·(|I|/m)·λ_min⁺(AᵀA)/λ_max(A_Iᵀ A_I).
[[nodiscard]] double theorem2_factor(const MatrixStore& A, std::span<const Index> block, double xi,
                                     Index beta);
[[nodiscard]] double theorem2_factor(const MatrixStore& A, const SpectralSummary& full,
                                     std::span<const Index> block, double xi, Index beta);

/// 1 − η·λ_min⁺(A_τhᵀ A_τh) / (|τ_h|·λ_max(A_Jᵀ A_J)).
[[nodiscard]] double theorem3_factor(const MatrixStore& A, std::span<const Index> block,
                                     std::span<const Index> tau_h, Index eta);

/// One enumerated sample and the per-sample inequality lhs ≤ rhs.
struct SampleBound {
  /// The drawn rows; for ordered tuples the groups are concatenated.
  IndexSet sample;
  /// I_k or J_k.
  IndexSet block;
  /// ‖x₊ − x⋆‖² after the block step.
  double lhs = 0.0;
  double rhs = 0.0;
  /// Contraction factor of the matching theorem for this sample.
  double factor = 0.0;
};

/// Every size-β subset τ: the BSKM1 step from x, lhs = ‖x₊ − x⋆‖² and
/// rhs = ‖x − x⋆‖² − |I|/λ_max(A_IᵀA_I)·‖A_τx − b_τ‖∞². Subsets are visited in
/// lexicographic order.
[[nodiscard]] std::vector<SampleBound> verify_theorem2_per_sample(
    const MatrixStore& A, const Vector& b, const Vector& x, const Vector& x_star, Index beta,
    double limit = kEnumerationLimit);

/// Every ordered tuple of η disjoint size-β_j subsets: the BSKM2 step from x,
/// lhs = ‖x₊ − x⋆‖² and rhs = ‖x − x⋆‖² − Σ_j ‖A_τj x − b_τj‖∞² / λ_max(A_JᵀA_J).
[[nodiscard]] std::vector<SampleBound> verify_theorem3_per_sample(
    const MatrixStore& A, const Vector& b, const Vector& x, const Vector& x_star, Index eta,
    Index beta_j, double limit = kEnumerationLimit);

struct ContractionParams {
  Index beta = 1;
  Index eta = 1;
  Index beta_j = 1;
};

struct ExpectedContraction {
  /// Exact mean of ‖x₊ − x⋆‖² over all equiprobable samples.
  double expected_lhs = 0.0;
  /// worst_factor · ‖x − x⋆‖².
  double bound_rhs = 0.0;
  /// Largest per-sample theorem factor.
  double worst_factor = 0.0;
  double error_sq = 0.0;
  Index samples = 0;
};

/// Exact one-step expectation for Method::bskm1 or Method::bskm2 against the
/// worst-case theorem factor. Other methods raise ContractViolation.
[[nodiscard]] ExpectedContraction expected_contraction_exact(
    Method method, const MatrixStore& A, const Vector& b, const Vector& x, const Vector& x_star,
    const ContractionParams& params, double limit = kEnumerationLimit);

struct SlackEntry {
  Index sample_id = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Bound quantities for one iterate, as printed by `verify-bounds`.
struct BoundReport {
  double xi_k = 0.0;
  /// Worst case over samples; NaN when not evaluated.
  double theorem2_factor = 0.0;
  double theorem3_factor = 0.0;
  std::vector<SlackEntry> per_sample_slack;
  SpectralSummary spectral;
};

}  // namespace bskm

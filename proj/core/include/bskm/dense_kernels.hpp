#pragma once

#include "bskm/matrix_store.hpp"
#include "bskm/types.hpp"

namespace bskm {

/// Largest and smallest positive eigenvalue of a Gram matrix MᵀM, and its
/// numerical rank.
struct SpectralSummary {
  double lambda_max = 0.0;
  double lambda_min_pos = 0.0;
  Index rank = 0;
};

/// Singular values at or below this fraction of σ_max count as zero:
/// max(rows, cols)·ε.
[[nodiscard]] double rank_tolerance(Index rows, Index cols);

/// Minimum-norm d minimising ‖rows·d − r‖₂, i.e. rows⁺·r, with numerical rank
/// taken from the singular values of `rows` at rank_tolerance().
/// A single row is handled by the closed form r·rowᵀ/‖row‖².
[[nodiscard]] Vector min_norm_least_squares(const Eigen::Ref<const DenseMatrix>& rows,
                                            const Vector& r);

struct GramEigenOptions {
  /// Above this Gram dimension the extremes come from power iteration on the
  /// Gram operator and inverse iteration on its Cholesky factor instead of a
  /// full dense eigendecomposition.
  Index dense_limit = 2000;
  int max_power_iterations = 10000;
  double power_tolerance = 1e-13;
};

/// Extreme eigenvalues of rowsᵀ·rows. Works with whichever of rowsᵀrows or
/// rows·rowsᵀ is smaller; both share their positive spectrum. Eigenvalues at
/// or below rank_tolerance()·λ_max count as zero.
[[nodiscard]] SpectralSummary gram_extreme_eigs(const Eigen::Ref<const DenseMatrix>& rows,
                                                const GramEigenOptions& options = {});

struct MinNormOptions {
  /// Systems with rows*cols up to this many entries use a dense complete
  /// orthogonal decomposition; larger ones run CGLS from the zero vector.
  Index dense_entry_limit = 30'000'000;
  /// ‖A·x − b‖₂/‖b‖₂ above this is reported as an inconsistent system.
  double consistency_tolerance = 1e-10;
  Index max_cgls_iterations = 100'000;
};

/// A⁺b for a consistent system.
///
/// Throws InconsistentSystem when the computed solution leaves a relative
/// residual above options.consistency_tolerance.
[[nodiscard]] Vector min_norm_solution(const MatrixStore& A, const Vector& b,
                                       const MinNormOptions& options = {});

}  // namespace bskm

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bskm/matrix_store.hpp"
#include "bskm/problems.hpp"
#include "bskm/sampling.hpp"
#include "bskm/types.hpp"

namespace bskm {

enum class Method {
  rk,        // randomized Kaczmarz, row ∝ ‖A_(i)‖²
  motzkin,   // globally most violated row
  skm,       // most violated row of a uniform β-sample
  bskm1,     // block: every row at least as violated as the sample maximum
  bskm2,     // block: the argmax rows of η disjoint sub-samples
  bskm2_pf,  // bskm2 selection, weighted sum of row projections instead of A_J⁺
};

[[nodiscard]] std::string_view to_string(Method method);
[[nodiscard]] std::optional<Method> parse_method(std::string_view name);

enum class WeightsMode { uniform, row_norm };
[[nodiscard]] std::string_view to_string(WeightsMode mode);

/// cached: every method keeps r = b − Ax for all m rows, updated after each
/// step (rank-1 update for single-row methods, recomputed for block methods)
/// and recomputed from scratch every `refresh_interval` steps.
/// on_demand: only the entries a method reads are evaluated; Motzkin and
/// BSKM1 read all m entries and therefore keep the cache regardless.
enum class ResidualPolicy { cached, on_demand };

enum class StoppingRule {
  res,                // ‖x − x_ref‖² / ‖x_ref‖²
  relative_residual,  // ‖Ax − b‖ / ‖b‖, used when no reference solution exists
};
[[nodiscard]] std::string_view to_string(StoppingRule rule);

enum class Termination { converged, iteration_cap, stagnation };
[[nodiscard]] std::string_view to_string(Termination termination);

struct SolverConfig {
  Method method = Method::skm;
  /// Sample size for SKM and BSKM1.
  Index beta = 1;
  /// Number of disjoint sub-samples for BSKM2 / BSKM2-PF.
  Index eta = 1;
  /// Size of every BSKM2 sub-sample.
  Index beta_j = 1;
  WeightsMode weights = WeightsMode::uniform;
  double res_tol = 1e-6;
  long max_iters = 200'000;
  std::uint64_t seed = 0;
  /// Record the stopping metric every this many iterations.
  long history_stride = 1;
  ResidualPolicy residual = ResidualPolicy::cached;
  long refresh_interval = 1000;
  /// Metric growth over its starting value that aborts the run.
  double divergence_factor = 1e6;

  /// Throws ContractViolation when a parameter is out of range for m rows.
  void validate(Index m) const;
};

/// ⌊β/η⌋, the sub-sample size used when only β and η are given.
[[nodiscard]] Index default_beta_j(Index beta, Index eta);

/// Row attaining the largest squared residual of a sample, ties to the
/// smallest row index; `delta` is that squared residual.
struct Violation {
  Index row = -1;
  double delta = 0.0;
};

/// Iterate plus whatever a method carries between steps.
struct IterateState {
  IterateState(const MatrixStore& A, const Vector& b, const SolverConfig& cfg);

  Vector x;
  long k = 0;
  /// b − Ax for every row, when maintained.
  std::optional<Vector> residual;
  Rng rng;
  RowSampler sampler;
  /// Steps between from-scratch recomputations of an incrementally updated cache.
  long refresh_interval = 1000;

  /// Recomputes the cache (if kept) after x was changed externally.
  void reset_residual(const MatrixStore& A, const Vector& b);

 private:
  friend struct StepAccess;
  std::shared_ptr<const ColumnIndex> columns_;
  std::shared_ptr<std::discrete_distribution<Index>> row_norm_distribution_;
};

/// What a step selected. `sample` holds the drawn rows in draw order (the η
/// sub-samples concatenated for BSKM2); `block` the rows projected onto,
/// sorted ascending; `pivot`/`delta` the sample argmax (for BSKM2, those of
/// the first sub-sample).
struct StepInfo {
  IndexSet sample;
  IndexSet block;
  Index pivot = -1;
  double delta = 0.0;
};

// Selection kernels. Residual entries come either from (A, b, x) or from a
// precomputed residual vector.

[[nodiscard]] Violation argmax_violation(const MatrixStore& A, const Vector& b, const Vector& x,
                                         std::span<const Index> sample);
[[nodiscard]] Violation argmax_violation(const Vector& residual, std::span<const Index> sample);

/// {t} ∪ {h ∉ sample : r_h² ≥ δ}, sorted. Sample rows that tie δ exactly are
/// included as well.
[[nodiscard]] IndexSet bskm1_build_index_set(const Vector& residual, std::span<const Index> sample,
                                             const Violation& violation);
[[nodiscard]] IndexSet bskm1_build_index_set(const MatrixStore& A, const Vector& b,
                                             const Vector& x, std::span<const Index> sample,
                                             const Violation& violation);

/// Argmax of each consecutive group of `group_size` rows in `samples`.
[[nodiscard]] std::vector<Violation> group_argmax(const MatrixStore& A, const Vector& b,
                                                  const Vector& x,
                                                  std::span<const Index> samples,
                                                  Index group_size);

// Update kernels.

/// Orthogonal projection onto {A_(i)·x = b_(i)}. Returns the coefficient α of
/// x ← x + α·A_(i)ᵀ.
double project_onto_row(const MatrixStore& A, const Vector& b, Vector& x, Index row);
/// x ← x + A_I⁺(b_I − A_I·x). A single row uses project_onto_row.
void project_onto_block(const MatrixStore& A, const Vector& b, Vector& x,
                        std::span<const Index> rows);
/// x ← x − Σ_{i∈I} w_i (A_(i)x − b_(i)) / ‖A_(i)‖² · A_(i)ᵀ, weights summing to 1.
void pseudoinverse_free_update(const MatrixStore& A, const Vector& b, Vector& x,
                               std::span<const Index> rows, WeightsMode weights);

// Steps on a stateful iterate. The *_with_sample forms take the sample
// instead of drawing it.

StepInfo rk_step(IterateState& state, const MatrixStore& A, const Vector& b);
StepInfo motzkin_step(IterateState& state, const MatrixStore& A, const Vector& b);
StepInfo skm_step(IterateState& state, const MatrixStore& A, const Vector& b,
                  const SolverConfig& cfg);
StepInfo skm_step_with_sample(IterateState& state, const MatrixStore& A, const Vector& b,
                              std::span<const Index> sample);
StepInfo bskm1_step(IterateState& state, const MatrixStore& A, const Vector& b,
                    const SolverConfig& cfg);
StepInfo bskm1_step_with_sample(IterateState& state, const MatrixStore& A, const Vector& b,
                                std::span<const Index> sample);
StepInfo bskm2_step(IterateState& state, const MatrixStore& A, const Vector& b,
                    const SolverConfig& cfg);
StepInfo bskm2_step_with_samples(IterateState& state, const MatrixStore& A, const Vector& b,
                                 std::span<const Index> samples, Index group_size);
StepInfo pseudoinverse_free_step(IterateState& state, const MatrixStore& A, const Vector& b,
                                 const SolverConfig& cfg);
StepInfo pseudoinverse_free_step_with_samples(IterateState& state, const MatrixStore& A,
                                              const Vector& b, std::span<const Index> samples,
                                              Index group_size, WeightsMode weights);

/// One step of cfg.method.
StepInfo step(IterateState& state, const MatrixStore& A, const Vector& b, const SolverConfig& cfg);

struct HistoryPoint {
  long iteration = 0;
  double metric = 0.0;
};

struct SolveReport {
  long iterations = 0;
  /// Iteration loop only; setup and reference solves are excluded.
  double wall_time_s = 0.0;
  double final_res = 0.0;
  StoppingRule stopping = StoppingRule::res;
  Termination termination = Termination::iteration_cap;
  std::vector<HistoryPoint> res_history;
  Vector x;
};

/// Runs cfg.method from x₀ = 0 until the metric drops below cfg.res_tol or
/// cfg.max_iters steps were taken. The metric is RES against x_ref when the
/// system carries one, the relative residual otherwise.
[[nodiscard]] SolveReport solve(const LinearSystem& system, const SolverConfig& cfg);
[[nodiscard]] SolveReport solve(const MatrixStore& A, const Vector& b, const Vector* x_ref,
                                const SolverConfig& cfg);

}  // namespace bskm

#include "bskm/solvers.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <string>

#include "bskm/dense_kernels.hpp"
#include "bskm/errors.hpp"

namespace bskm {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 6> kMethodNames{{
    {Method::rk, "rk"},
    {Method::motzkin, "motzkin"},
    {Method::skm, "skm"},
    {Method::bskm1, "bskm1"},
    {Method::bskm2, "bskm2"},
    {Method::bskm2_pf, "bskm2-pf"},
}};

bool needs_full_residual(Method method) {
  return method == Method::motzkin || method == Method::bskm1;
}

bool better(double value, Index row, double best, Index best_row) {
  return value > best || (value == best && row < best_row);
}

template <typename ResidualAt>
Violation argmax_over(std::span<const Index> sample, ResidualAt&& residual_at) {
  if (sample.empty()) throw ContractViolation("argmax_violation: empty sample");
  Violation out;
  out.delta = -1.0;
  for (const Index i : sample) {
    const double r = residual_at(i);
    const double sq = r * r;
    if (better(sq, i, out.delta, out.row)) {
      out.delta = sq;
      out.row = i;
    }
  }
  return out;
}

}  // namespace

// Accessors for the state's lazily built helpers.
struct StepAccess {
  static const ColumnIndex& columns(IterateState& state, const MatrixStore& A) {
    if (!state.columns_) state.columns_ = std::make_shared<const ColumnIndex>(A);
    return *state.columns_;
  }

  static Index draw_by_row_norm(IterateState& state, const MatrixStore& A) {
    if (!state.row_norm_distribution_) {
      const auto norms = A.row_sq_norms();
      state.row_norm_distribution_ =
          std::make_shared<std::discrete_distribution<Index>>(norms.begin(), norms.end());
    }
    return (*state.row_norm_distribution_)(state.rng);
  }
};

namespace {

double residual_at(const IterateState& state, const MatrixStore& A, const Vector& b, Index i) {
  if (state.residual) return (*state.residual)[i];
  return b[i] - A.row_dot(i, state.x);
}

void recompute_residual(IterateState& state, const MatrixStore& A, const Vector& b) {
  if (!state.residual) return;
  A.multiply(state.x, *state.residual);
  *state.residual = b - *state.residual;
}

// After x += alpha·A_(row)ᵀ.
void after_row_update(IterateState& state, const MatrixStore& A, const Vector& b, Index row,
                      double alpha) {
  ++state.k;
  if (!state.residual) return;
  if (state.k % state.refresh_interval == 0) {
    recompute_residual(state, A, b);
    return;
  }
  StepAccess::columns(state, A).subtract_row_image(A, row, alpha, *state.residual);
}

void after_block_update(IterateState& state, const MatrixStore& A, const Vector& b) {
  ++state.k;
  recompute_residual(state, A, b);
}

StepInfo single_row_step(IterateState& state, const MatrixStore& A, const Vector& b,
                         std::span<const Index> sample, const Violation& v) {
  StepInfo info;
  info.sample.assign(sample.begin(), sample.end());
  info.block = {v.row};
  info.pivot = v.row;
  info.delta = v.delta;
  const double alpha = project_onto_row(A, b, state.x, v.row);
  after_row_update(state, A, b, v.row, alpha);
  return info;
}

Violation argmax_in_state(const IterateState& state, const MatrixStore& A, const Vector& b,
                          std::span<const Index> sample) {
  return argmax_over(sample, [&](Index i) { return residual_at(state, A, b, i); });
}

IndexSet bskm2_block(const std::vector<Violation>& winners) {
  IndexSet block;
  block.reserve(winners.size());
  for (const auto& w : winners) block.push_back(w.row);
  std::sort(block.begin(), block.end());
  return block;
}

std::vector<Violation> group_argmax_in_state(const IterateState& state, const MatrixStore& A,
                                             const Vector& b, std::span<const Index> samples,
                                             Index group_size) {
  if (group_size < 1 || samples.empty() ||
      static_cast<Index>(samples.size()) % group_size != 0) {
    throw ContractViolation("sub-samples must be nonempty groups of equal size");
  }
  std::vector<Violation> out;
  for (std::size_t start = 0; start < samples.size(); start += static_cast<std::size_t>(group_size)) {
    out.push_back(argmax_in_state(state, A, b, samples.subspan(start, static_cast<std::size_t>(group_size))));
  }
  return out;
}

}  // namespace

std::string_view to_string(Method method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (const auto& [m, label] : kMethodNames) {
    if (label == name) return m;
  }
  return std::nullopt;
}

std::string_view to_string(WeightsMode mode) {
  return mode == WeightsMode::uniform ? "uniform" : "row-norm";
}

std::string_view to_string(StoppingRule rule) {
  return rule == StoppingRule::res ? "res" : "relative-residual";
}

std::string_view to_string(Termination termination) {
  switch (termination) {
    case Termination::converged:
      return "converged";
    case Termination::iteration_cap:
      return "iteration-cap";
    case Termination::stagnation:
      return "stagnation";
  }
  return "unknown";
}

void SolverConfig::validate(Index m) const {
  auto fail = [](const std::string& what) { throw ContractViolation("SolverConfig: " + what); };
  if (m < 1) fail("system has no rows");
  if (method == Method::skm || method == Method::bskm1) {
    if (beta < 1 || beta > m) {
      fail("beta=" + std::to_string(beta) + " outside [1, " + std::to_string(m) + "]");
    }
  }
  if (method == Method::bskm2 || method == Method::bskm2_pf) {
    if (eta < 1 || eta > m) fail("eta must lie in [1, m]");
    if (beta_j < 1) fail("beta_j must be positive");
    if (eta * beta_j > m) {
      fail("eta*beta_j=" + std::to_string(eta * beta_j) + " exceeds m=" + std::to_string(m));
    }
  }
  if (!(res_tol > 0.0)) fail("res_tol must be positive");
  if (max_iters < 1) fail("max_iters must be at least 1");
  if (history_stride < 1) fail("history_stride must be at least 1");
  if (refresh_interval < 1) fail("refresh_interval must be at least 1");
}

Index default_beta_j(Index beta, Index eta) {
  if (eta < 1) throw ContractViolation("default_beta_j: eta must be positive");
  return beta / eta;
}

IterateState::IterateState(const MatrixStore& A, const Vector& b, const SolverConfig& cfg)
    : x(Vector::Zero(A.cols())),
      rng(cfg.seed),
      sampler(A.rows()),
      refresh_interval(std::max(1L, cfg.refresh_interval)) {
  if (b.size() != A.rows()) throw ContractViolation("IterateState: b length mismatch");
  if (cfg.residual == ResidualPolicy::cached || needs_full_residual(cfg.method)) {
    residual = b;  // x₀ = 0
  }
}

void IterateState::reset_residual(const MatrixStore& A, const Vector& b) {
  recompute_residual(*this, A, b);
}

Violation argmax_violation(const MatrixStore& A, const Vector& b, const Vector& x,
                           std::span<const Index> sample) {
  return argmax_over(sample, [&](Index i) { return residual_entry(A, b, x, i); });
}

Violation argmax_violation(const Vector& residual, std::span<const Index> sample) {
  return argmax_over(sample, [&](Index i) {
    if (i < 0 || i >= residual.size()) throw ContractViolation("argmax_violation: row out of range");
    return residual[i];
  });
}

IndexSet bskm1_build_index_set(const Vector& residual, std::span<const Index> /*sample*/,
                               const Violation& violation) {
  IndexSet out;
  for (Index h = 0; h < residual.size(); ++h) {
    if (h == violation.row || residual[h] * residual[h] >= violation.delta) out.push_back(h);
  }
  return out;
}

IndexSet bskm1_build_index_set(const MatrixStore& A, const Vector& b, const Vector& x,
                               std::span<const Index> sample, const Violation& violation) {
  Vector r = A.multiply(x);
  r = b - r;
  return bskm1_build_index_set(r, sample, violation);
}

std::vector<Violation> group_argmax(const MatrixStore& A, const Vector& b, const Vector& x,
                                    std::span<const Index> samples, Index group_size) {
  if (group_size < 1 || samples.empty() ||
      static_cast<Index>(samples.size()) % group_size != 0) {
    throw ContractViolation("group_argmax: sub-samples must be nonempty groups of equal size");
  }
  std::vector<Violation> out;
  for (std::size_t start = 0; start < samples.size(); start += static_cast<std::size_t>(group_size)) {
    out.push_back(argmax_violation(A, b, x, samples.subspan(start, static_cast<std::size_t>(group_size))));
  }
  return out;
}

double project_onto_row(const MatrixStore& A, const Vector& b, Vector& x, Index row) {
  const double alpha = residual_entry(A, b, x, row) / A.row_sq_norm(row);
  A.add_row(row, alpha, x);
  return alpha;
}

void project_onto_block(const MatrixStore& A, const Vector& b, Vector& x,
                        std::span<const Index> rows) {
  if (rows.empty()) throw ContractViolation("project_onto_block: empty block");
  if (rows.size() == 1) {
    project_onto_row(A, b, x, rows[0]);
    return;
  }
  const DenseMatrix block = A.gather_rows(rows);
  Vector r(static_cast<Index>(rows.size()));
  for (Index k = 0; k < r.size(); ++k) r[k] = b[rows[k]];
  r.noalias() -= block * x;
  x += min_norm_least_squares(block, r);
}

void pseudoinverse_free_update(const MatrixStore& A, const Vector& b, Vector& x,
                               std::span<const Index> rows, WeightsMode weights) {
  if (rows.empty()) throw ContractViolation("pseudoinverse_free_update: empty block");
  double weight_total = 0.0;
  if (weights == WeightsMode::row_norm) {
    for (const Index i : rows) weight_total += A.row_sq_norm(i);
  }
  std::vector<double> coeff;
  coeff.reserve(rows.size());
  for (const Index i : rows) {
    const double w = weights == WeightsMode::uniform ? 1.0 / static_cast<double>(rows.size())
                                                     : A.row_sq_norm(i) / weight_total;
    coeff.push_back(w * residual_entry(A, b, x, i) / A.row_sq_norm(i));
  }
  // All coefficients use the same x, so apply them after evaluating.
  for (std::size_t k = 0; k < rows.size(); ++k) A.add_row(rows[k], coeff[k], x);
}

StepInfo rk_step(IterateState& state, const MatrixStore& A, const Vector& b) {
  const Index row = StepAccess::draw_by_row_norm(state, A);
  const std::array<Index, 1> sample{row};
  const Violation v{row, std::pow(residual_at(state, A, b, row), 2)};
  return single_row_step(state, A, b, sample, v);
}

StepInfo motzkin_step(IterateState& state, const MatrixStore& A, const Vector& b) {
  StepInfo info;
  Violation v;
  v.delta = -1.0;
  for (Index i = 0; i < A.rows(); ++i) {
    const double r = residual_at(state, A, b, i);
    if (better(r * r, i, v.delta, v.row)) v = {i, r * r};
  }
  info.block = {v.row};
  info.pivot = v.row;
  info.delta = v.delta;
  const double alpha = project_onto_row(A, b, state.x, v.row);
  after_row_update(state, A, b, v.row, alpha);
  return info;
}

StepInfo skm_step_with_sample(IterateState& state, const MatrixStore& A, const Vector& b,
                              std::span<const Index> sample) {
  return single_row_step(state, A, b, sample, argmax_in_state(state, A, b, sample));
}

StepInfo skm_step(IterateState& state, const MatrixStore& A, const Vector& b,
                  const SolverConfig& cfg) {
  const auto sample = state.sampler.draw(cfg.beta, state.rng);
  const IndexSet copy(sample.begin(), sample.end());
  return skm_step_with_sample(state, A, b, copy);
}

StepInfo bskm1_step_with_sample(IterateState& state, const MatrixStore& A, const Vector& b,
                                std::span<const Index> sample) {
  if (!state.residual) {
    state.residual = Vector(A.rows());
    recompute_residual(state, A, b);
  }
  StepInfo info;
  info.sample.assign(sample.begin(), sample.end());
  const Violation v = argmax_violation(*state.residual, sample);
  info.pivot = v.row;
  info.delta = v.delta;
  info.block = bskm1_build_index_set(*state.residual, sample, v);
  project_onto_block(A, b, state.x, info.block);
  after_block_update(state, A, b);
  return info;
}

StepInfo bskm1_step(IterateState& state, const MatrixStore& A, const Vector& b,
                    const SolverConfig& cfg) {
  const auto sample = state.sampler.draw(cfg.beta, state.rng);
  const IndexSet copy(sample.begin(), sample.end());
  return bskm1_step_with_sample(state, A, b, copy);
}

StepInfo bskm2_step_with_samples(IterateState& state, const MatrixStore& A, const Vector& b,
                                 std::span<const Index> samples, Index group_size) {
  const auto winners = group_argmax_in_state(state, A, b, samples, group_size);
  StepInfo info;
  info.sample.assign(samples.begin(), samples.end());
  info.pivot = winners.front().row;
  info.delta = winners.front().delta;
  info.block = bskm2_block(winners);
  project_onto_block(A, b, state.x, info.block);
  after_block_update(state, A, b);
  return info;
}

StepInfo bskm2_step(IterateState& state, const MatrixStore& A, const Vector& b,
                    const SolverConfig& cfg) {
  const auto samples = state.sampler.draw_disjoint(cfg.eta, cfg.beta_j, state.rng);
  const IndexSet copy(samples.begin(), samples.end());
  return bskm2_step_with_samples(state, A, b, copy, cfg.beta_j);
}

StepInfo pseudoinverse_free_step_with_samples(IterateState& state, const MatrixStore& A,
                                              const Vector& b, std::span<const Index> samples,
                                              Index group_size, WeightsMode weights) {
  const auto winners = group_argmax_in_state(state, A, b, samples, group_size);
  StepInfo info;
  info.sample.assign(samples.begin(), samples.end());
  info.pivot = winners.front().row;
  info.delta = winners.front().delta;
  info.block = bskm2_block(winners);
  pseudoinverse_free_update(A, b, state.x, info.block, weights);
  after_block_update(state, A, b);
  return info;
}

StepInfo pseudoinverse_free_step(IterateState& state, const MatrixStore& A, const Vector& b,
                                 const SolverConfig& cfg) {
  const auto samples = state.sampler.draw_disjoint(cfg.eta, cfg.beta_j, state.rng);
  const IndexSet copy(samples.begin(), samples.end());
  return pseudoinverse_free_step_with_samples(state, A, b, copy, cfg.beta_j, cfg.weights);
}

StepInfo step(IterateState& state, const MatrixStore& A, const Vector& b, const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::rk:
      return rk_step(state, A, b);
    case Method::motzkin:
      return motzkin_step(state, A, b);
    case Method::skm:
      return skm_step(state, A, b, cfg);
    case Method::bskm1:
      return bskm1_step(state, A, b, cfg);
    case Method::bskm2:
      return bskm2_step(state, A, b, cfg);
    case Method::bskm2_pf:
      return pseudoinverse_free_step(state, A, b, cfg);
  }
  throw ContractViolation("step: unknown method");
}

SolveReport solve(const LinearSystem& system, const SolverConfig& cfg) {
  return solve(system.A, system.b, system.x_ref ? &*system.x_ref : nullptr, cfg);
}

SolveReport solve(const MatrixStore& A, const Vector& b, const Vector* x_ref,
                  const SolverConfig& cfg) {
  cfg.validate(A.rows());
  if (b.size() != A.rows()) throw ContractViolation("solve: b length mismatch");

  SolveReport report;
  report.stopping = x_ref ? StoppingRule::res : StoppingRule::relative_residual;
  const double b_norm = b.norm();
  if (!x_ref && b_norm == 0.0) {
    throw UndefinedQuantity("solve: relative residual undefined for b = 0");
  }

  IterateState state(A, b, cfg);
  Vector scratch;
  auto metric = [&]() {
    if (x_ref) return compute_res(state.x, *x_ref);
    if (state.residual) return state.residual->norm() / b_norm;
    A.multiply(state.x, scratch);
    return (b - scratch).norm() / b_norm;
  };

  double current = metric();
  const double initial = current;
  report.res_history.push_back({0, current});

  const auto start = std::chrono::steady_clock::now();
  while (true) {
    if (current < cfg.res_tol) {
      report.termination = Termination::converged;
      break;
    }
    if (state.k >= cfg.max_iters) {
      report.termination = Termination::iteration_cap;
      break;
    }
    step(state, A, b, cfg);
    current = metric();
    if (state.k % cfg.history_stride == 0) report.res_history.push_back({state.k, current});
    if (!std::isfinite(current) || current > cfg.divergence_factor * initial) {
      report.termination = Termination::stagnation;
      break;
    }
  }
  const auto stop = std::chrono::steady_clock::now();

  if (report.res_history.back().iteration != state.k) report.res_history.push_back({state.k, current});
  report.iterations = state.k;
  report.wall_time_s = std::chrono::duration<double>(stop - start).count();
  report.final_res = current;
  report.x = std::move(state.x);
  return report;
}

}  // namespace bskm

#include "bskm/dense_kernels.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bskm/errors.hpp"

namespace bskm {

namespace {

using ColMatrix = Eigen::MatrixXd;

Vector deterministic_start(Index dim) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = 1.0 + static_cast<double>(i % 7) / 7.0;
  return v.normalized();
}

// Gram operator of the smaller side: G = M·Mᵀ when M is wide, MᵀM otherwise.
struct GramOperator {
  const Eigen::Ref<const DenseMatrix>& m;
  bool wide;

  [[nodiscard]] Index dim() const { return wide ? m.rows() : m.cols(); }

  void apply(const Vector& v, Vector& out) const {
    if (wide) {
      Vector t = m.transpose() * v;
      out.noalias() = m * t;
    } else {
      Vector t = m * v;
      out.noalias() = m.transpose() * t;
    }
  }

  [[nodiscard]] ColMatrix form() const {
    if (wide) return m * m.transpose();
    return m.transpose() * m;
  }
};

double power_iteration_max(const GramOperator& gram, const GramEigenOptions& options) {
  Vector v = deterministic_start(gram.dim());
  Vector w;
  double lambda = 0.0;
  for (int it = 0; it < options.max_power_iterations; ++it) {
    gram.apply(v, w);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (std::abs(next - lambda) <= options.power_tolerance * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

SpectralSummary iterative_extremes(const GramOperator& gram, Index rows, Index cols,
                                   const GramEigenOptions& options) {
  SpectralSummary out;
  out.lambda_max = power_iteration_max(gram, options);
  const Eigen::LLT<ColMatrix> llt(gram.form());
  const double floor = rank_tolerance(rows, cols) * out.lambda_max;
  const double min_pivot = llt.info() == Eigen::Success
                               ? llt.matrixLLT().diagonal().cwiseAbs2().minCoeff()
                               : 0.0;
  if (!(min_pivot > floor)) {
    throw ContractViolation(
        "gram_extreme_eigs: rank-deficient Gram matrix above the dense eigensolver limit");
  }
  Vector v = deterministic_start(gram.dim());
  Vector w;
  double mu = 0.0;
  for (int it = 0; it < options.max_power_iterations; ++it) {
    w = llt.solve(v);
    const double next = v.dot(w);
    v = w.normalized();
    if (std::abs(next - mu) <= options.power_tolerance * std::abs(next)) {
      mu = next;
      break;
    }
    mu = next;
  }
  out.lambda_min_pos = 1.0 / mu;
  out.rank = gram.dim();
  return out;
}

}  // namespace

double rank_tolerance(Index rows, Index cols) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

Vector min_norm_least_squares(const Eigen::Ref<const DenseMatrix>& rows, const Vector& r) {
  if (rows.rows() == 0) throw ContractViolation("min_norm_least_squares: empty row selection");
  if (r.size() != rows.rows()) {
    throw ContractViolation("min_norm_least_squares: right-hand side length mismatch");
  }
  if (rows.rows() == 1) {
    const double sq = rows.row(0).squaredNorm();
    if (sq == 0.0) return Vector::Zero(rows.cols());
    return (r[0] / sq) * rows.row(0).transpose();
  }
  const double tolerance = rank_tolerance(rows.rows(), rows.cols());
  if (rows.rows() >= rows.cols()) {
    Eigen::BDCSVD<ColMatrix> svd(rows, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(tolerance);
    return svd.solve(r);
  }
  // Wide block M (k×n, k < n): Mᵀ = Q·R, so M = Rᵀ·Qᵀ shares its singular
  // values with the k×k factor R and M⁺r = Q·(Rᵀ)⁺r.
  const Index k = rows.rows();
  const Eigen::HouseholderQR<ColMatrix> qr(rows.transpose());
  const ColMatrix upper = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  Vector padded = Vector::Zero(rows.cols());
  // σ_min ≥ 1/‖R⁻¹‖_F and σ_max ≤ ‖R‖_F: when that bound clears the rank
  // threshold the block has full row rank and triangular solves suffice.
  const ColMatrix inverse =
      upper.triangularView<Eigen::Upper>().solve(ColMatrix::Identity(k, k));
  if (inverse.allFinite() && 1.0 / inverse.norm() > tolerance * upper.norm()) {
    padded.head(k) = upper.transpose().triangularView<Eigen::Lower>().solve(r);
  } else {
    Eigen::BDCSVD<ColMatrix> svd(upper.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(tolerance);
    padded.head(k) = svd.solve(r);
  }
  return qr.householderQ() * padded;
}

SpectralSummary gram_extreme_eigs(const Eigen::Ref<const DenseMatrix>& rows,
                                  const GramEigenOptions& options) {
  if (rows.rows() == 0) throw ContractViolation("gram_extreme_eigs: empty row selection");
  const GramOperator gram{rows, rows.rows() < rows.cols()};
  if (gram.dim() > options.dense_limit) {
    return iterative_extremes(gram, rows.rows(), rows.cols(), options);
  }
  const Eigen::SelfAdjointEigenSolver<ColMatrix> eig(gram.form(), Eigen::EigenvaluesOnly);
  const Vector& values = eig.eigenvalues();  // ascending
  SpectralSummary out;
  out.lambda_max = std::max(values[values.size() - 1], 0.0);
  const double floor = rank_tolerance(rows.rows(), rows.cols()) * out.lambda_max;
  for (Index i = values.size() - 1; i >= 0 && values[i] > floor; --i) {
    out.lambda_min_pos = values[i];
    ++out.rank;
  }
  return out;
}

Vector min_norm_solution(const MatrixStore& A, const Vector& b, const MinNormOptions& options) {
  if (b.size() != A.rows()) throw ContractViolation("min_norm_solution: b length mismatch");
  const double b_norm = b.norm();
  if (b_norm == 0.0) return Vector::Zero(A.cols());

  Vector x;
  if (A.rows() * A.cols() <= options.dense_entry_limit) {
    Eigen::CompleteOrthogonalDecomposition<ColMatrix> cod;
    cod.setThreshold(rank_tolerance(A.rows(), A.cols()));
    cod.compute(A.to_dense());
    x = cod.solve(b);
    // One refinement pass; the correction also lies in the row space.
    const Vector r = b - A.multiply(x);
    x += cod.solve(r);
  } else {
    // CGLS from zero converges to the minimum-norm solution.
    x = Vector::Zero(A.cols());
    Vector r = b;
    Vector s;
    A.multiply_transpose(r, s);
    Vector p = s;
    Vector q;
    double gamma = s.squaredNorm();
    const double stop = gamma * 1e-30;
    for (Index it = 0; it < options.max_cgls_iterations && gamma > stop; ++it) {
      A.multiply(p, q);
      const double alpha = gamma / q.squaredNorm();
      x += alpha * p;
      r -= alpha * q;
      A.multiply_transpose(r, s);
      const double next = s.squaredNorm();
      p = s + (next / gamma) * p;
      gamma = next;
    }
  }

  const double rel = (A.multiply(x) - b).norm() / b_norm;
  if (!(rel <= options.consistency_tolerance)) {
    std::ostringstream msg;
    msg << "min_norm_solution: relative residual " << rel << " exceeds "
        << options.consistency_tolerance << "; the system appears inconsistent";
    throw InconsistentSystem(rel, msg.str());
  }
  return x;
}

}  // namespace bskm

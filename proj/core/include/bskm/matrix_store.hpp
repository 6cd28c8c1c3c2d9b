#pragma once

#include <span>
#include <vector>

#include "bskm/types.hpp"

namespace bskm {

enum class Layout { dense_row_major, csr };

/// Immutable m×n matrix, either dense row-major or CSR, with the squared
/// Euclidean norm of every row cached at construction.
///
/// Every row must have positive norm: a zero row cannot be projected onto and
/// is rejected by the factories with a ContractViolation naming the row.
/// CSR input must have nondecreasing offsets starting at 0, column indices in
/// range and strictly increasing within a row.
///
/// Safe to share read-only between threads.
class MatrixStore {
 public:
  MatrixStore() = default;

  /// `values` holds rows*cols entries in row-major order.
  static MatrixStore dense(Index rows, Index cols, std::vector<double> values);
  static MatrixStore from_dense(const Eigen::Ref<const DenseMatrix>& matrix);
  static MatrixStore csr(Index rows, Index cols, std::vector<Index> row_ptr,
                         std::vector<Index> col_idx, std::vector<double> values);

  [[nodiscard]] Index rows() const noexcept { return rows_; }
  [[nodiscard]] Index cols() const noexcept { return cols_; }
  [[nodiscard]] Layout layout() const noexcept { return layout_; }
  /// Stored entries: rows*cols for dense, len(values) for CSR.
  [[nodiscard]] Index stored_entries() const noexcept {
    return static_cast<Index>(values_.size());
  }
  /// Fraction of explicitly stored entries, nnz / (rows*cols).
  [[nodiscard]] double density() const noexcept;

  [[nodiscard]] double row_sq_norm(Index i) const;
  [[nodiscard]] std::span<const double> row_sq_norms() const noexcept { return row_sq_norms_; }
  [[nodiscard]] double frobenius_sq() const noexcept { return frobenius_sq_; }

  /// A_(i) · x. Touches only stored entries for CSR.
  [[nodiscard]] double row_dot(Index i, const Vector& x) const;
  /// x += alpha · A_(i)ᵀ.
  void add_row(Index i, double alpha, Vector& x) const;
  /// y = A·x, y resized to rows().
  void multiply(const Vector& x, Vector& y) const;
  [[nodiscard]] Vector multiply(const Vector& x) const;
  /// y = Aᵀ·x, y resized to cols().
  void multiply_transpose(const Vector& x, Vector& y) const;

  /// Copies the selected rows, in the given order, into a compact buffer.
  [[nodiscard]] DenseMatrix gather_rows(std::span<const Index> rows) const;
  [[nodiscard]] DenseMatrix to_dense() const;

  // CSR arrays; empty for dense layout.
  [[nodiscard]] std::span<const Index> row_ptr() const noexcept { return row_ptr_; }
  [[nodiscard]] std::span<const Index> col_idx() const noexcept { return col_idx_; }
  /// CSR values, or the row-major dense buffer.
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

 private:
  void check_row(Index i) const;
  void finish_construction();

  Index rows_ = 0;
  Index cols_ = 0;
  Layout layout_ = Layout::dense_row_major;
  std::vector<Index> row_ptr_;
  std::vector<Index> col_idx_;
  std::vector<double> values_;
  std::vector<double> row_sq_norms_;
  double frobenius_sq_ = 0.0;
};

/// b_(i) − A_(i)·x.
[[nodiscard]] double residual_entry(const MatrixStore& A, const Vector& b, const Vector& x, Index i);

/// Column-oriented copy of a CSR pattern, used for rank-1 residual updates
/// r ← r − alpha·A·A_(i)ᵀ that touch only the columns present in row i.
class ColumnIndex {
 public:
  explicit ColumnIndex(const MatrixStore& A);

  /// r -= alpha · A · A_(i)ᵀ.
  void subtract_row_image(const MatrixStore& A, Index i, double alpha, Vector& r) const;

 private:
  std::vector<Index> col_ptr_;
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

}  // namespace bskm

#include "bskm/matrix_store.hpp"

#include <string>

#include "bskm/errors.hpp"

namespace bskm {

namespace {

using DenseMap = Eigen::Map<const DenseMatrix>;

std::string row_label(Index i) { return "row " + std::to_string(i); }

}  // namespace

MatrixStore MatrixStore::dense(Index rows, Index cols, std::vector<double> values) {
  if (rows < 1 || cols < 1) {
    throw ContractViolation("matrix dimensions must be positive");
  }
  if (static_cast<Index>(values.size()) != rows * cols) {
    throw ContractViolation("dense buffer holds " + std::to_string(values.size()) +
                            " values, expected " + std::to_string(rows * cols));
  }
  MatrixStore store;
  store.rows_ = rows;
  store.cols_ = cols;
  store.layout_ = Layout::dense_row_major;
  store.values_ = std::move(values);
  store.finish_construction();
  return store;
}

MatrixStore MatrixStore::from_dense(const Eigen::Ref<const DenseMatrix>& matrix) {
  std::vector<double> values(static_cast<std::size_t>(matrix.size()));
  Eigen::Map<DenseMatrix>(values.data(), matrix.rows(), matrix.cols()) = matrix;
  return dense(matrix.rows(), matrix.cols(), std::move(values));
}

MatrixStore MatrixStore::csr(Index rows, Index cols, std::vector<Index> row_ptr,
                             std::vector<Index> col_idx, std::vector<double> values) {
  if (rows < 1 || cols < 1) {
    throw ContractViolation("matrix dimensions must be positive");
  }
  if (static_cast<Index>(row_ptr.size()) != rows + 1) {
    throw ContractViolation("row_ptr must have rows+1 entries");
  }
  if (col_idx.size() != values.size()) {
    throw ContractViolation("col_idx and values differ in length");
  }
  if (row_ptr.front() != 0 || row_ptr.back() != static_cast<Index>(values.size())) {
    throw ContractViolation("row_ptr must start at 0 and end at nnz");
  }
  for (Index i = 0; i < rows; ++i) {
    const Index begin = row_ptr[i];
    const Index end = row_ptr[i + 1];
    if (end < begin) {
      throw ContractViolation("row_ptr decreases at " + row_label(i));
    }
    for (Index p = begin; p < end; ++p) {
      if (col_idx[p] < 0 || col_idx[p] >= cols) {
        throw ContractViolation("column index out of range in " + row_label(i));
      }
      if (p > begin && col_idx[p] <= col_idx[p - 1]) {
        throw ContractViolation("column indices not strictly increasing in " + row_label(i));
      }
    }
  }
  MatrixStore store;
  store.rows_ = rows;
  store.cols_ = cols;
  store.layout_ = Layout::csr;
  store.row_ptr_ = std::move(row_ptr);
  store.col_idx_ = std::move(col_idx);
  store.values_ = std::move(values);
  store.finish_construction();
  return store;
}

void MatrixStore::finish_construction() {
  row_sq_norms_.assign(static_cast<std::size_t>(rows_), 0.0);
  frobenius_sq_ = 0.0;
  for (Index i = 0; i < rows_; ++i) {
    double sum = 0.0;
    if (layout_ == Layout::csr) {
      for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) sum += values_[p] * values_[p];
    } else {
      const double* row = values_.data() + i * cols_;
      for (Index j = 0; j < cols_; ++j) sum += row[j] * row[j];
    }
    if (!(sum > 0.0)) {
      throw ContractViolation(row_label(i) + " has zero norm; zero rows are not supported");
    }
    row_sq_norms_[i] = sum;
    frobenius_sq_ += sum;
  }
}

double MatrixStore::density() const noexcept {
  return static_cast<double>(values_.size()) /
         (static_cast<double>(rows_) * static_cast<double>(cols_));
}

void MatrixStore::check_row(Index i) const {
  if (i < 0 || i >= rows_) {
    throw ContractViolation(row_label(i) + " out of range [0, " + std::to_string(rows_) + ")");
  }
}

double MatrixStore::row_sq_norm(Index i) const {
  check_row(i);
  return row_sq_norms_[i];
}

double MatrixStore::row_dot(Index i, const Vector& x) const {
  check_row(i);
  if (x.size() != cols_) throw ContractViolation("row_dot: vector length mismatch");
  if (layout_ == Layout::csr) {
    double sum = 0.0;
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) sum += values_[p] * x[col_idx_[p]];
    return sum;
  }
  return Eigen::Map<const Vector>(values_.data() + i * cols_, cols_).dot(x);
}

void MatrixStore::add_row(Index i, double alpha, Vector& x) const {
  check_row(i);
  if (x.size() != cols_) throw ContractViolation("add_row: vector length mismatch");
  if (layout_ == Layout::csr) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) x[col_idx_[p]] += alpha * values_[p];
    return;
  }
  x += alpha * Eigen::Map<const Vector>(values_.data() + i * cols_, cols_);
}

void MatrixStore::multiply(const Vector& x, Vector& y) const {
  if (x.size() != cols_) throw ContractViolation("multiply: vector length mismatch");
  y.resize(rows_);
  if (layout_ == Layout::csr) {
    for (Index i = 0; i < rows_; ++i) {
      double sum = 0.0;
      for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) sum += values_[p] * x[col_idx_[p]];
      y[i] = sum;
    }
    return;
  }
  y.noalias() = DenseMap(values_.data(), rows_, cols_) * x;
}

Vector MatrixStore::multiply(const Vector& x) const {
  Vector y;
  multiply(x, y);
  return y;
}

void MatrixStore::multiply_transpose(const Vector& x, Vector& y) const {
  if (x.size() != rows_) throw ContractViolation("multiply_transpose: vector length mismatch");
  if (layout_ == Layout::csr) {
    y.setZero(cols_);
    for (Index i = 0; i < rows_; ++i) {
      for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) y[col_idx_[p]] += values_[p] * x[i];
    }
    return;
  }
  y.resize(cols_);
  y.noalias() = DenseMap(values_.data(), rows_, cols_).transpose() * x;
}

DenseMatrix MatrixStore::gather_rows(std::span<const Index> rows) const {
  DenseMatrix out = DenseMatrix::Zero(static_cast<Index>(rows.size()), cols_);
  for (Index k = 0; k < static_cast<Index>(rows.size()); ++k) {
    const Index i = rows[k];
    check_row(i);
    if (layout_ == Layout::csr) {
      for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out(k, col_idx_[p]) = values_[p];
    } else {
      out.row(k) = Eigen::Map<const Eigen::RowVectorXd>(values_.data() + i * cols_, cols_);
    }
  }
  return out;
}

DenseMatrix MatrixStore::to_dense() const {
  if (layout_ == Layout::dense_row_major) return DenseMap(values_.data(), rows_, cols_);
  DenseMatrix out = DenseMatrix::Zero(rows_, cols_);
  for (Index i = 0; i < rows_; ++i) {
    for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) out(i, col_idx_[p]) = values_[p];
  }
  return out;
}

double residual_entry(const MatrixStore& A, const Vector& b, const Vector& x, Index i) {
  if (b.size() != A.rows()) throw ContractViolation("residual_entry: b length mismatch");
  return b[i] - A.row_dot(i, x);
}

ColumnIndex::ColumnIndex(const MatrixStore& A) {
  if (A.layout() != Layout::csr) return;
  const auto row_ptr = A.row_ptr();
  const auto cols = A.col_idx();
  const auto vals = A.values();
  col_ptr_.assign(static_cast<std::size_t>(A.cols() + 1), 0);
  for (const Index j : cols) ++col_ptr_[j + 1];
  for (Index j = 0; j < A.cols(); ++j) col_ptr_[j + 1] += col_ptr_[j];
  row_idx_.resize(cols.size());
  values_.resize(cols.size());
  std::vector<Index> next(col_ptr_.begin(), col_ptr_.end() - 1);
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      const Index slot = next[cols[p]]++;
      row_idx_[slot] = i;
      values_[slot] = vals[p];
    }
  }
}

void ColumnIndex::subtract_row_image(const MatrixStore& A, Index i, double alpha, Vector& r) const {
  if (A.layout() == Layout::dense_row_major) {
    const DenseMap dense(A.values().data(), A.rows(), A.cols());
    r.noalias() -= alpha * (dense * dense.row(i).transpose());
    return;
  }
  const auto row_ptr = A.row_ptr();
  const auto cols = A.col_idx();
  const auto vals = A.values();
  for (Index p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
    const double scale = alpha * vals[p];
    const Index j = cols[p];
    for (Index q = col_ptr_[j]; q < col_ptr_[j + 1]; ++q) r[row_idx_[q]] -= scale * values_[q];
  }
}

}  // namespace bskm

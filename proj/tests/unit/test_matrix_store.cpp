#include <gtest/gtest.h>

#include <cmath>

#include "bskm/errors.hpp"
#include "bskm/matrix_store.hpp"
#include "bskm/problems.hpp"

using namespace bskm;

namespace {

MatrixStore identity(Index n) {
  std::vector<double> v(static_cast<std::size_t>(n * n), 0.0);
  for (Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i * n + i)] = 1.0;
  return MatrixStore::dense(n, n, std::move(v));
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (const double e : v) out[i++] = e;
  return out;
}

}  // namespace

TEST(RowDot, IdentityRowPicksCoordinate) {
  EXPECT_EQ(identity(3).row_dot(1, vec({4, 5, 6})), 5.0);
}

TEST(RowDot, ZeroVector) {
  const auto A = MatrixStore::dense(2, 2, {1, 2, 3, 4});
  EXPECT_EQ(A.row_dot(0, vec({0, 0})), 0.0);
}

TEST(RowDot, CsrSingleStoredEntry) {
  const auto A = MatrixStore::csr(2, 2, {0, 1, 2}, {1, 0}, {2.0, 7.0});
  EXPECT_EQ(A.row_dot(1, vec({1, 1})), 7.0);
  EXPECT_EQ(A.layout(), Layout::csr);
}

TEST(RowDot, OutOfRangeRow) {
  const auto A = identity(3);
  EXPECT_THROW((void)A.row_dot(3, vec({1, 1, 1})), ContractViolation);
  EXPECT_THROW((void)A.row_dot(-1, vec({1, 1, 1})), ContractViolation);
}

TEST(ResidualEntry, Examples) {
  const auto I2 = identity(2);
  EXPECT_EQ(residual_entry(I2, vec({1, 1}), vec({0, 0}), 0), 1.0);
  EXPECT_EQ(residual_entry(I2, vec({1, 1}), vec({1, 1}), 1), 0.0);
  const auto A = MatrixStore::dense(1, 2, {2, 0});
  EXPECT_EQ(residual_entry(A, vec({6}), vec({1, 0}), 0), 4.0);
  EXPECT_THROW((void)residual_entry(A, vec({6}), vec({1, 0}), 1), ContractViolation);
}

TEST(MatrixStore, RejectsZeroRow) {
  try {
    (void)MatrixStore::dense(2, 2, {1, 0, 0, 0});
    FAIL() << "zero row accepted";
  } catch (const ContractViolation& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
  EXPECT_THROW((void)MatrixStore::csr(2, 2, {0, 1, 1}, {0}, {1.0}), ContractViolation);
}

TEST(MatrixStore, RejectsBrokenCsr) {
  // row_ptr[0] != 0
  EXPECT_THROW((void)MatrixStore::csr(1, 2, {1, 2}, {0, 1}, {1, 1}), ContractViolation);
  // decreasing offsets
  EXPECT_THROW((void)MatrixStore::csr(2, 2, {0, 2, 1}, {0, 1}, {1, 1}), ContractViolation);
  // column out of range
  EXPECT_THROW((void)MatrixStore::csr(1, 2, {0, 1}, {2}, {1}), ContractViolation);
  // columns not strictly increasing
  EXPECT_THROW((void)MatrixStore::csr(1, 3, {0, 2}, {1, 1}, {1, 1}), ContractViolation);
  // offsets disagree with value count
  EXPECT_THROW((void)MatrixStore::csr(1, 2, {0, 1}, {0, 1}, {1, 1}), ContractViolation);
}

TEST(MatrixStore, RowNormsMatchRecomputation) {
  const LinearSystem sys = generate_gaussian(40, 7, 3);
  const DenseMatrix d = sys.A.to_dense();
  for (Index i = 0; i < d.rows(); ++i) {
    double s = 0.0;
    for (Index j = 0; j < d.cols(); ++j) s += d(i, j) * d(i, j);
    EXPECT_NEAR(sys.A.row_sq_norm(i), s, 1e-12 * s);
  }

  const auto S = MatrixStore::csr(3, 4, {0, 2, 3, 5}, {0, 3, 1, 0, 2}, {1.5, -2, 3, 0.5, 4});
  EXPECT_DOUBLE_EQ(S.row_sq_norm(0), 1.5 * 1.5 + 4.0);
  EXPECT_DOUBLE_EQ(S.row_sq_norm(1), 9.0);
  EXPECT_DOUBLE_EQ(S.row_sq_norm(2), 0.25 + 16.0);
  EXPECT_DOUBLE_EQ(S.frobenius_sq(), 1.5 * 1.5 + 4.0 + 9.0 + 0.25 + 16.0);
  EXPECT_DOUBLE_EQ(S.density(), 5.0 / 12.0);
}

TEST(MatrixStore, DenseAndCsrAgree) {
  const auto S = MatrixStore::csr(3, 4, {0, 2, 3, 5}, {0, 3, 1, 0, 2}, {1.5, -2, 3, 0.5, 4});
  const auto D = MatrixStore::from_dense(S.to_dense());
  const Vector x = vec({1, -2, 0.5, 3});
  const Vector y = vec({2, 1, -1});
  EXPECT_LT((S.multiply(x) - D.multiply(x)).norm(), 1e-14);
  Vector t1;
  Vector t2;
  S.multiply_transpose(y, t1);
  D.multiply_transpose(y, t2);
  EXPECT_LT((t1 - t2).norm(), 1e-14);
  Vector a = x;
  Vector c = x;
  S.add_row(2, 0.7, a);
  D.add_row(2, 0.7, c);
  EXPECT_LT((a - c).norm(), 1e-14);

  const std::vector<Index> pick{2, 0};
  const DenseMatrix g = S.gather_rows(pick);
  ASSERT_EQ(g.rows(), 2);
  EXPECT_EQ(g(0, 2), 4.0);
  EXPECT_EQ(g(1, 3), -2.0);
}

TEST(ColumnIndex, RankOneResidualUpdate) {
  for (const bool sparse : {false, true}) {
    const LinearSystem sys = generate_gaussian(12, 5, 9);
    MatrixStore A = sys.A;
    if (sparse) {
      const DenseMatrix d = sys.A.to_dense();
      std::vector<Index> ptr{0};
      std::vector<Index> cols;
      std::vector<double> vals;
      for (Index i = 0; i < d.rows(); ++i) {
        for (Index j = 0; j < d.cols(); ++j) {
          if ((i + j) % 3 != 0 || j == i % d.cols()) {
            cols.push_back(j);
            vals.push_back(d(i, j));
          }
        }
        ptr.push_back(static_cast<Index>(cols.size()));
      }
      A = MatrixStore::csr(d.rows(), d.cols(), ptr, cols, vals);
    }
    const ColumnIndex columns(A);
    Vector x = Vector::Zero(A.cols());
    Vector r = sys.b;
    const double alpha = 0.37;
    columns.subtract_row_image(A, 4, alpha, r);
    A.add_row(4, alpha, x);
    EXPECT_LT((r - (sys.b - A.multiply(x))).norm(), 1e-12) << "sparse=" << sparse;
  }
}

#pragma once

// Plain-loop reference implementations used to check the library. Nothing in
// here calls into Eigen's decompositions or the bskm kernels under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bskm/matrix_store.hpp"

namespace oracle {

using Mat = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

inline Vec to_vec(const bskm::Vector& v) { return Vec(v.data(), v.data() + v.size()); }

inline Mat rows_of(const bskm::MatrixStore& A, std::span<const bskm::Index> rows) {
  const bskm::DenseMatrix dense = A.to_dense();
  Mat out;
  for (const auto i : rows) {
    Vec r(static_cast<std::size_t>(A.cols()));
    for (bskm::Index j = 0; j < A.cols(); ++j) r[static_cast<std::size_t>(j)] = dense(i, j);
    out.push_back(std::move(r));
  }
  return out;
}

inline Mat all_rows(const bskm::MatrixStore& A) {
  std::vector<bskm::Index> idx(static_cast<std::size_t>(A.rows()));
  for (bskm::Index i = 0; i < A.rows(); ++i) idx[static_cast<std::size_t>(i)] = i;
  return rows_of(A, idx);
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sq_norm(const Vec& a) { return dot(a, a); }

inline Vec sub(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

/// MᵀM for an r×c matrix given by rows.
inline Mat gram(const Mat& rows) {
  const std::size_t c = rows.empty() ? 0 : rows.front().size();
  Mat g(c, Vec(c, 0.0));
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < c; ++i) {
      for (std::size_t j = 0; j < c; ++j) g[i][j] += r[i] * r[j];
    }
  }
  return g;
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
inline Vec jacobi_eigenvalues(Mat s) {
  const std::size_t n = s.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        total += s[i][j] * s[i][j];
        if (i != j) off += s[i][j] * s[i][j];
      }
    }
    if (off <= 1e-32 * total) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (s[p][q] == 0.0) continue;
        const double theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s[k][p];
          const double skq = s[k][q];
          s[k][p] = c * skp - sn * skq;
          s[k][q] = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s[p][k];
          const double sqk = s[q][k];
          s[p][k] = c * spk - sn * sqk;
          s[q][k] = sn * spk + c * sqk;
        }
      }
    }
  }
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = s[i][i];
  std::sort(out.begin(), out.end());
  return out;
}

struct Extremes {
  double lambda_max = 0.0;
  double lambda_min_pos = 0.0;
  std::size_t rank = 0;
};

inline Extremes gram_extremes(const Mat& rows, double relative_floor = 1e-12) {
  const Vec eig = jacobi_eigenvalues(gram(rows));
  Extremes e;
  e.lambda_max = eig.back();
  for (auto it = eig.rbegin(); it != eig.rend() && *it > relative_floor * e.lambda_max; ++it) {
    e.lambda_min_pos = *it;
    ++e.rank;
  }
  return e;
}

/// Orthonormal basis of span(rows) by modified Gram–Schmidt with
/// reorthogonalisation.
inline Mat row_space_basis(const Mat& rows, double relative_drop = 1e-10) {
  Mat basis;
  for (const auto& r : rows) {
    Vec v = r;
    const double start = std::sqrt(sq_norm(v));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double c = dot(q, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
      }
    }
    const double len = std::sqrt(sq_norm(v));
    if (len > relative_drop * start && len > 0.0) {
      for (double& e : v) e /= len;
      basis.push_back(std::move(v));
    }
  }
  return basis;
}

inline Vec project(const Mat& basis, const Vec& v) {
  Vec out(v.size(), 0.0);
  for (const auto& q : basis) {
    const double c = dot(q, v);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += c * q[i];
  }
  return out;
}

/// Norm of the part of v orthogonal to span(basis).
inline double orthogonal_norm(const Mat& basis, const Vec& v) {
  return std::sqrt(sq_norm(sub(v, project(basis, v))));
}

/// Projection of x onto {y : B·y = B·x_star}, which is x + P_B(x_star − x).
inline Vec project_onto_block(const Mat& block_rows, const Vec& x, const Vec& x_star) {
  const Vec d = project(row_space_basis(block_rows), sub(x_star, x));
  Vec out = x;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += d[i];
  return out;
}

inline Vec residual(const Mat& rows, const Vec& b, const Vec& x) {
  Vec r(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) r[i] = b[i] - dot(rows[i], x);
  return r;
}

/// Smallest row attaining max r_i² over the sample.
inline std::pair<bskm::Index, double> argmax(const Vec& r, std::span<const bskm::Index> sample) {
  bskm::Index best = -1;
  double delta = -1.0;
  for (const auto i : sample) {
    const double v = r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
    if (v > delta || (v == delta && i < best)) {
      best = i;
      delta = v;
    }
  }
  return {best, delta};
}

/// {t} ∪ {h ∉ sample : r_h² ≥ δ} plus sample rows tying δ, row by row.
inline std::vector<bskm::Index> threshold_set(const Vec& r, std::span<const bskm::Index> sample) {
  const auto [t, delta] = argmax(r, sample);
  std::vector<bskm::Index> out;
  for (bskm::Index h = 0; h < static_cast<bskm::Index>(r.size()); ++h) {
    const bool in_sample = std::find(sample.begin(), sample.end(), h) != sample.end();
    const double v = r[static_cast<std::size_t>(h)] * r[static_cast<std::size_t>(h)];
    if (h == t || (!in_sample && v >= delta) || (in_sample && v == delta)) out.push_back(h);
  }
  return out;
}

/// Every k-subset of [0, n) in lexicographic order.
inline std::vector<std::vector<bskm::Index>> subsets(bskm::Index n, bskm::Index k) {
  std::vector<std::vector<bskm::Index>> out;
  std::vector<bskm::Index> cur;
  auto rec = [&](auto&& self, bskm::Index start) -> void {
    if (static_cast<bskm::Index>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (bskm::Index i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace oracle

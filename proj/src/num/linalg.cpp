//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldkl/num/linalg.hpp"

#include <cmath>
#include <string>

#include "moldkl/errors.hpp"

namespace moldkl::num {

namespace {

// Unblocked factorization used only to locate the failing pivot after the
// fast path reports a numerical issue.
Index find_bad_pivot(const Matrix &a) {
  const Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d))
      return j;
    l(j, j) = std::sqrt(d);
    if (j + 1 < n) {
      l.col(j).tail(n - j - 1) =
          (a.col(j).tail(n - j - 1) -
           l.bottomLeftCorner(n - j - 1, j) * l.row(j).head(j).transpose()) /
          l(j, j);
    }
  }
  return n;  // unreachable when the caller saw a failure
}

}  // namespace

Vector CholeskyFactor::solve(const Vector &b) const {
  if (b.size() != l.rows())
    throw ShapeMismatch("cholesky solve: rhs length " +
                        std::to_string(b.size()) + " vs dimension " +
                        std::to_string(l.rows()));
  Vector x = l.triangularView<Eigen::Lower>().solve(b);
  l.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Matrix CholeskyFactor::solve(const Matrix &b) const {
  if (b.rows() != l.rows())
    throw ShapeMismatch("cholesky solve: rhs rows " +
                        std::to_string(b.rows()) + " vs dimension " +
                        std::to_string(l.rows()));
  Matrix x = l.triangularView<Eigen::Lower>().solve(b);
  l.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Vector CholeskyFactor::forward_solve(const Vector &b) const {
  if (b.size() != l.rows())
    throw ShapeMismatch("forward solve: rhs length " +
                        std::to_string(b.size()) + " vs dimension " +
                        std::to_string(l.rows()));
  return l.triangularView<Eigen::Lower>().solve(b);
}

double CholeskyFactor::log_det() const {
  return 2.0 * l.diagonal().array().log().sum();
}

CholeskyFactor cholesky(const Matrix &a) {
  if (a.rows() != a.cols())
    throw ShapeMismatch("cholesky: matrix is " + std::to_string(a.rows()) +
                        "x" + std::to_string(a.cols()));
  if (a.rows() == 0)
    throw ShapeMismatch("cholesky: empty matrix");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    Index pivot = find_bad_pivot(a);
    throw NotPositiveDefinite(static_cast<std::size_t>(pivot),
                              "matrix is not positive definite");
  }
  return CholeskyFactor{llt.matrixL()};
}

std::vector<double> to_row_major(const Matrix &m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  std::size_t k = 0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      out[k++] = m(i, j);
  return out;
}

Matrix from_row_major(Index rows, Index cols, const std::vector<double> &v) {
  if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) !=
      v.size())
    throw ShapeMismatch("from_row_major: " + std::to_string(v.size()) +
                        " values for " + std::to_string(rows) + "x" +
                        std::to_string(cols));
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      m(i, j) = v[k++];
  return m;
}

Matrix squared_distances(const Matrix &a, const Matrix &b) {
  if (a.cols() != b.cols())
    throw ShapeMismatch("squared_distances: dims " + std::to_string(a.cols()) +
                        " vs " + std::to_string(b.cols()));
  // d2_ij = |a_i|^2 + |b_j|^2 - 2 a_i . b_j, clamped against round-off.
  Vector an = a.rowwise().squaredNorm();
  Vector bn = b.rowwise().squaredNorm();
  Matrix d2 = -2.0 * (a * b.transpose());
  d2.colwise() += an;
  d2.rowwise() += bn.transpose();
  return d2.cwiseMax(0.0);
}

}  // namespace moldkl::num

//
// Project moldkl - Copyright 2026 The moldkl Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDKL_NUM_LINALG_HPP_
#define MOLDKL_NUM_LINALG_HPP_

#include <vector>

#include <Eigen/Dense>

namespace moldkl::num {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
struct CholeskyFactor {
  Matrix l;

  // Solves (L L^T) x = b.
  Vector solve(const Vector &b) const;
  Matrix solve(const Matrix &b) const;

  // Solves L x = b (forward substitution only).
  Vector forward_solve(const Vector &b) const;

  // log det(L L^T) = 2 sum log L_ii.
  double log_det() const;
};

// Throws NotPositiveDefinite with the failing pivot index.
CholeskyFactor cholesky(const Matrix &a);

// Row-major round trips; used by checkpoints and the Adam packing code.
std::vector<double> to_row_major(const Matrix &m);
Matrix from_row_major(Index rows, Index cols, const std::vector<double> &v);

// Squared Euclidean distances between the rows of a (n x d) and b (m x d).
Matrix squared_distances(const Matrix &a, const Matrix &b);

}  // namespace moldkl::num

#endif  // MOLDKL_NUM_LINALG_HPP_

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace srlab {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns, vectors.col(i) pairs with values(i)
};

/// Dense symmetric eigensolver: Householder reduction to tridiagonal form
/// followed by the implicit-shift QL iteration, accumulating the orthogonal
/// transformations. Only the lower triangle of `a` is read.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a);

/// Max-norm asymmetry |a - a^T|.
double asymmetry(const Eigen::MatrixXd& a);
double asymmetry(const SparseMatrix& a);

}  // namespace srlab

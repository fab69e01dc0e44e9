#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "srlab/linalg.hpp"
#include "srlab/mesh.hpp"
#include "srlab/nonlinearity.hpp"
#include "srlab/weights.hpp"

namespace srlab {

/// Discrete Gram matrices of the weak form on P1 elements.
///
/// DOF(node v, component a) = v * k + a.
///   S   = gradient term + A (interior) + Sigma (boundary)
///   B   = M (interior) + P (boundary)
///   B_P = P (boundary) only
struct GramPair {
  SparseMatrix S;
  SparseMatrix B;
  SparseMatrix B_P;
  int k = 1;
  int num_nodes = 0;
  /// DOFs of vertices on the boundary, ascending.
  std::vector<int> boundary_dofs;

  int size() const noexcept { return num_nodes * k; }
};

/// Assembles S, B and B_P with the 3-point interior rule and 2-point Gauss on edges.
/// A and M must be interior-supported, Sigma and P boundary-supported, all symmetric.
GramPair assemble_gram(const Mesh& m, const MatrixField& A, const MatrixField& Sigma, const MatrixField& M,
                       const MatrixField& P);

/// Copy of g whose B is replaced by B_P: the pencil (S, B_P) of the problem with M = 0.
GramPair boundary_pencil(const GramPair& g);

/// Component (v, a) = int_{bdry} g_a(x, U_h(x)) phi_v ds.
Eigen::VectorXd assemble_boundary_load(const Mesh& m, const BoundaryNonlinearity& g, const Eigen::VectorXd& U);

/// d(load)/dU; couples boundary DOFs only.
SparseMatrix assemble_boundary_jacobian(const Mesh& m, const BoundaryNonlinearity& g, const Eigen::VectorXd& U,
                                        bool allow_fd = true);

/// Boundary mass matrix with identity weight: U^T Mb U = int_{bdry} |U_h|^2 ds.
SparseMatrix assemble_boundary_mass(const Mesh& m, int k);

/// Coordinate text: header "N nnz", then "row col value" lines (0-based).
void write_coo(std::ostream& out, const SparseMatrix& a);
SparseMatrix read_coo(std::istream& in);

}  // namespace srlab

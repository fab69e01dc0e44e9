#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "srlab/assembly.hpp"
#include "srlab/mesh.hpp"

namespace srlab {

struct EigenOptions {
  /// Number of lowest eigenpairs to return.
  int count = 10;
  /// Fixed shift sigma >= 0 for S + sigma B. When empty, sigma = 0 is tried
  /// first and `auto_shift` is used if S (reduced) fails to factor.
  std::optional<double> shift;
  double auto_shift = 1.0;
  /// Reduced eigenvalues theta < kernel_threshold * theta_max count as B-null modes.
  double kernel_threshold = 1e-10;
  /// Return min(count, finite eigenvalue count) pairs instead of failing.
  bool clamp_count = false;
};

/// Lowest eigenpairs of S u = mu B u with B-orthonormal eigenvectors.
struct Spectrum {
  int k = 1;
  Eigen::VectorXd eigenvalues;   // ascending, length m
  Eigen::MatrixXd eigenvectors;  // N x m
  /// Dimension of the discrete null space of B.
  int kernel_dim = 0;
  /// Number of finite eigenvalues; kernel_dim + finite_count = N.
  int finite_count = 0;
  double shift_used = 0.0;
  double kernel_threshold = 1e-10;
  /// max |Phi^T B Phi - I|
  double orthonormality_error = 0.0;
  /// max |Phi^T S Phi - diag(mu)|
  double diagonality_error = 0.0;

  int count() const noexcept { return static_cast<int>(eigenvalues.size()); }
};

/// Generalized eigensolve via shifted congruence.
///
/// DOFs whose B row vanishes are eliminated exactly by a Schur complement of
/// the (SPD) shifted matrix K = S + sigma B, which leaves a dense pencil on the
/// B-weighted DOFs. That pencil is reduced by the Cholesky factor L of the
/// condensed K to C = L^-1 B L^-T, and C is diagonalized densely. Reduced
/// eigenvalues theta near zero span the rest of the B-null space; the others map
/// to mu = 1/theta - sigma.
Spectrum solve_eigs(const GramPair& g, const EigenOptions& opts = {});

struct Expansion {
  Eigen::VectorXd coefficients;  // c_j = phi_j^T B U
  /// max_j |c_j - phi_j^T S U / mu_j| / max(1, |c|_inf) over mu_j > 0.
  double formula_discrepancy = 0.0;
  /// |U - Phi c|_B, the part of U not represented by the computed eigenvectors.
  double remainder_norm = 0.0;
};

Expansion expand(const Spectrum& sp, const GramPair& g, const Eigen::VectorXd& U);

struct ParsevalResiduals {
  double energy = 0.0;  // |U^T S U - sum mu_j c_j^2| / U^T S U
  double mass = 0.0;    // |U^T B U - sum c_j^2| / U^T B U
};

ParsevalResiduals parseval_check(const Spectrum& sp, const GramPair& g, const Eigen::VectorXd& U);

struct KernelBasis {
  Eigen::MatrixXd basis;  // N x dimension, orthonormal columns
  int dimension = 0;
};

/// Null space of B (the functions of zero weighted norm).
KernelBasis hmp_kernel(const GramPair& g, double threshold = 1e-10);

struct SignVerdict {
  enum class Status { OneSigned, SignChange, InconclusiveMultiple };
  Status status = Status::InconclusiveMultiple;
  std::vector<double> min_value;  // per component
  std::vector<double> max_value;
  std::vector<bool> one_signed;
};

/// Checks whether the first eigenfunction has one sign per component.
/// Inconclusive when mu_2 - mu_1 <= 1e-8 mu_2.
SignVerdict sign_check_first(const Spectrum& sp, const Mesh& m);

}  // namespace srlab

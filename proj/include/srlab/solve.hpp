#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "srlab/assembly.hpp"
#include "srlab/mesh.hpp"
#include "srlab/nonlinearity.hpp"
#include "srlab/spectrum.hpp"

namespace srlab {

/// Midpoint of the gap (mu_j, mu_{j+1}), j 1-based. Throws ResonanceError when the
/// relative gap is below 1e-6 or the midpoint sits within 1e-8 mu_{j+1} of any
/// computed eigenvalue.
double pick_delta(const Spectrum& sp, int j);

/// Factored form of S - C where C couples boundary DOFs only.
///
/// Interior DOFs are eliminated once with a sparse Cholesky factor of S_II (any
/// S built from the gradient term is definite there), leaving a dense boundary
/// Schur complement. Each solve then factors the boundary block with partial
/// pivoting, which handles the indefinite shifted operators the homotopy needs.
class BoundaryCondensedOperator {
 public:
  explicit BoundaryCondensedOperator(const GramPair& g);
  ~BoundaryCondensedOperator();
  BoundaryCondensedOperator(BoundaryCondensedOperator&&) noexcept;
  BoundaryCondensedOperator& operator=(BoundaryCondensedOperator&&) noexcept;

  int size() const noexcept { return n_; }
  const std::vector<int>& boundary_dofs() const noexcept { return bdofs_; }

  /// Sets the boundary correction C (given as an N x N sparse matrix whose
  /// nonzeros lie in boundary rows/columns) and factors the condensed block.
  /// Throws ResonanceError when the reciprocal condition estimate is < 1e-12.
  void factor(const SparseMatrix& C);
  /// Solves (S - C) U = rhs with the most recent factor().
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  double rcond() const noexcept { return rcond_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_ = 0;
  std::vector<int> bdofs_;
  double rcond_ = 0.0;
};

/// Solves (S - delta B_P) U = rhs: the discrete inverse of the linear boundary operator.
Eigen::VectorXd solve_linear_L(const GramPair& g, double delta, const Eigen::VectorXd& rhs);

struct NewtonOptions {
  double tol = 1e-10;
  int maxit = 50;
};

struct HomotopyOptions {
  int steps = 10;
  NewtonOptions newton;
  /// Energy bound; default 1e6 (1 + |G(0)|_2).
  std::optional<double> cap;
  /// Central differences for Jacobian entries without a symbolic form.
  bool allow_fd = true;
};

struct StepRecord {
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double energy = 0.0;  // sqrt(U^T S U)
};

enum class HomotopyStatus { Converged, BoundExceeded, NewtonFailed };

const char* to_string(HomotopyStatus s);

struct HomotopyTrace {
  std::vector<StepRecord> steps;  // accepted steps only
  Eigen::VectorXd U;              // last accepted iterate
  HomotopyStatus status = HomotopyStatus::NewtonFailed;
  double delta = 0.0;
  double cap = 0.0;
  double tol = 0.0;
  /// lambda and |U|_S of the iterate that tripped the failure, when any.
  double failed_lambda = 0.0;
  double failed_energy = 0.0;
  double failed_residual = 0.0;
  std::string message;
};

/// Continuation in lambda = m / steps of
///   R(U) = S U - (1 - lambda) delta B_P U - lambda G(U) = 0
/// from U = 0 at lambda = 0, Newton-corrected at each step and warm-started.
/// Iterates whose energy norm exceeds the cap stop the run with BoundExceeded.
HomotopyTrace homotopy_solve(const GramPair& g, const BoundaryNonlinearity& gnl, const Mesh& m, double delta,
                             const HomotopyOptions& opts = {});

/// R(U) for the given lambda and delta.
Eigen::VectorXd homotopy_residual(const GramPair& g, const BoundaryNonlinearity& gnl, const Mesh& m,
                                  const Eigen::VectorXd& U, double lambda, double delta);

struct ResidualReport {
  double residual = 0.0;  // |R(U)|_2
  double energy = 0.0;    // |U|_S
  double mass = 0.0;      // |U|_B
  double trace = 0.0;     // L2 norm of the boundary trace
};

ResidualReport residual_report(const GramPair& g, const BoundaryNonlinearity& gnl, const Mesh& m,
                               const Eigen::VectorXd& U, double lambda, double delta);

double energy_norm(const GramPair& g, const Eigen::VectorXd& U);

struct PicardOptions {
  double omega = 1.0;
  double tol = 1e-13;  // on |U_{n+1} - U_n|_S / (1 + |U_{n+1}|_S)
  int maxit = 2000;
};

struct PicardResult {
  Eigen::VectorXd U;
  int iterations = 0;
  bool converged = false;
  double last_increment = 0.0;
};

/// Damped fixed-point iteration U <- (1 - omega) U + omega K (G(U) - delta B_P U)
/// with K = (S - delta B_P)^-1. Independent of the Newton path.
PicardResult picard_solve(const GramPair& g, const BoundaryNonlinearity& gnl, const Mesh& m, double delta,
                          const PicardOptions& opts = {});

}  // namespace srlab

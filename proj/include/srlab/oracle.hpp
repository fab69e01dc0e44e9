#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "srlab/assembly.hpp"
#include "srlab/mesh.hpp"
#include "srlab/nonlinearity.hpp"

namespace srlab::oracle {

/// Eigenvalues of du/dnu + sigma u = mu u for harmonic u on the unit disk:
/// sigma, then sigma + n twice for n = 1, 2, ...
std::vector<double> disk_steklov_exact(int n_modes, double sigma);

/// Sorted merge of two ascending lists.
std::vector<double> decoupled_union(std::span<const double> a, std::span<const double> b);

/// A boundary-value problem with a known solution on the unit disk polygon.
/// Weights and g use the project's expression syntax; rows are k x k.
struct OracleCase {
  std::string id;
  std::string description;
  int k = 1;
  int sectors = 64;
  int rings = 16;
  std::vector<std::vector<std::string>> A, Sigma, M, P;
  std::vector<std::string> g;      // g_a(x, n, u)
  std::vector<std::string> exact;  // w_a(x)
  /// Homotopy anchor inside the first gap of the analytic spectrum.
  double delta = 1.5;
  /// Expected relative L2 error of the boundary trace on the given mesh.
  double trace_tolerance = 2e-2;
};

std::vector<std::string> manufactured_case_ids();
/// Throws InvalidParameter for unknown ids.
OracleCase manufactured_case(const std::string& id);

struct SelfCheck {
  bool pass = false;
  /// max |-Lap w_a + (A w)_a| over interior samples.
  double interior_residual = 0.0;
  /// max |g_a(x, n, w) - (dw_a/dnu + (Sigma w)_a)| over (x, n) samples.
  double boundary_residual = 0.0;
};

/// Verifies that the exact data satisfy the case's own equations to 1e-12.
SelfCheck self_check(const OracleCase& c);

struct AssembledCase {
  Mesh mesh;
  GramPair gram;
  BoundaryNonlinearity g;
};

/// Mesh (with `refine` uniform refinements), Gram pair and nonlinearity of a case.
AssembledCase assemble_case(const OracleCase& c, int refine = 0);

/// ||U_h - w||_{L2(bdry)} / ||w||_{L2(bdry)} with w evaluated exactly at the
/// boundary quadrature points.
double relative_trace_error(const Mesh& m, const Eigen::VectorXd& U, const std::vector<std::string>& exact);

}  // namespace srlab::oracle

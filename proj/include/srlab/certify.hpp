#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "srlab/assembly.hpp"
#include "srlab/expr.hpp"
#include "srlab/mesh.hpp"
#include "srlab/nonlinearity.hpp"
#include "srlab/spectrum.hpp"
#include "srlab/weights.hpp"

namespace srlab {

/// alpha and beta sampled at the boundary quadrature points (two per edge, edge order).
struct SlopeBounds {
  std::vector<double> alpha;
  std::vector<double> beta;
};

/// alpha(x) = a * lambda_min(P(x)), beta(x) = b * lambda_max(P(x)).
SlopeBounds build_alpha_beta(double a, double b, const MatrixField& P, const Mesh& m);

/// Samples a coefficient (x1, x2, n1, n2) at the boundary quadrature points.
std::vector<double> sample_on_boundary(const Expr& e, const Mesh& m);

struct NonresonanceCertificate {
  int j = 0;  // 1-based: mu_j = eigenvalues[j-1]
  double mu_j = 0.0;
  double mu_j1 = 0.0;
  std::vector<int> cluster_j;   // 0-based eigenpair indices spanning E_j
  std::vector<int> cluster_j1;  // ... E_{j+1}
  double cluster_width_j = 0.0;
  double cluster_width_j1 = 0.0;
  double margin_alpha = 0.0;  // min (alpha - mu_j)
  double margin_order = 0.0;  // min (beta - alpha)
  double margin_beta = 0.0;   // min (mu_{j+1} - beta)
  Eigen::MatrixXd gram_j;     // int (alpha - mu_j) <phi_p, phi_q> over E_j
  Eigen::MatrixXd gram_j1;    // int (mu_{j+1} - beta) <phi_p, phi_q> over E_{j+1}
  double gram_min_j = 0.0;
  double gram_min_j1 = 0.0;
  bool pass = false;
  std::vector<std::string> reasons;
};

/// Checks mu_j <= alpha <= beta <= mu_{j+1} at every boundary quadrature point and
/// positive definiteness of the two integral Gram matrices. The alpha condition is
/// tested on E_j and the beta condition on E_{j+1}. Throws ResonanceError when
/// mu_j and mu_{j+1} belong to the same cluster.
NonresonanceCertificate certify(const Spectrum& sp, const GramPair& g, const Mesh& m, std::span<const double> alpha,
                                std::span<const double> beta, int j);

/// Empirical <g(x, r d), r d> / r^2 envelope. Diagnostic only: finite radii never
/// witness a liminf, so this never certifies anything.
struct SlopeEnvelope {
  std::vector<double> radii;
  std::vector<double> min_by_radius;
  std::vector<double> max_by_radius;
  std::vector<double> point_min;  // per boundary quadrature point, at the largest radius
  std::vector<double> point_max;
  bool certifying = false;
};

SlopeEnvelope slope_scan(const BoundaryNonlinearity& g, const Mesh& m, std::span<const double> radii,
                         int directions);

}  // namespace srlab

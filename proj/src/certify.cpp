#include "srlab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "srlab/error.hpp"
#include "srlab/quadrature.hpp"

namespace srlab {

namespace {

constexpr double kClusterTol = 1e-8;
constexpr double kMarginTol = 1e-10;
constexpr double kGramTol = 1e-12;

std::vector<int> cluster_around(const Spectrum& sp, int idx) {
  const double mu = sp.eigenvalues(idx);
  const double tol = kClusterTol * std::max(1.0, std::abs(mu));
  int lo = idx;
  int hi = idx;
  while (lo > 0 && std::abs(sp.eigenvalues(lo - 1) - mu) <= tol) --lo;
  while (hi + 1 < sp.count() && std::abs(sp.eigenvalues(hi + 1) - mu) <= tol) ++hi;
  std::vector<int> out;
  for (int i = lo; i <= hi; ++i) out.push_back(i);
  return out;
}

// G_pq = sum_q w (weight_q) <phi_p(x_q), phi_q(x_q)> over the given eigenpairs.
Eigen::MatrixXd weighted_trace_gram(const Spectrum& sp, const Mesh& m, const std::vector<BoundaryQuadPoint>& quad,
                                    const std::vector<int>& cluster, const std::vector<double>& weight) {
  const int k = sp.k;
  const int d = static_cast<int>(cluster.size());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd trace(k, d);
  for (std::size_t qi = 0; qi < quad.size(); ++qi) {
    const auto& q = quad[qi];
    const auto& be = m.boundary_edges()[q.edge];
    for (int p = 0; p < d; ++p) {
      const auto phi = sp.eigenvectors.col(cluster[static_cast<std::size_t>(p)]);
      for (int a = 0; a < k; ++a) trace(a, p) = q.shape[0] * phi(be.v[0] * k + a) + q.shape[1] * phi(be.v[1] * k + a);
    }
    gram.noalias() += (q.weight * weight[qi]) * (trace.transpose() * trace);
  }
  return 0.5 * (gram + gram.transpose());
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return std::numeric_limits<double>::infinity();
  return spectral_decompose(a).D.minCoeff();
}

}  // namespace

SlopeBounds build_alpha_beta(double a, double b, const MatrixField& P, const Mesh& m) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidParameter("build_alpha_beta: a and b must be positive");
  if (P.support() != Support::Boundary) throw InvalidParameter("build_alpha_beta: P must be boundary-supported");
  SlopeBounds s;
  for (const auto& q : boundary_quadrature(m)) {
    auto [lo, hi] = lambda_extremes(P, q.x);
    s.alpha.push_back(a * lo);
    s.beta.push_back(b * hi);
  }
  return s;
}

std::vector<double> sample_on_boundary(const Expr& e, const Mesh& m) {
  if (e.depends_on_u()) throw InvalidParameter("sample_on_boundary: expression must not depend on u");
  std::vector<double> out;
  for (const auto& q : boundary_quadrature(m)) out.push_back(e.eval(EvalPoint{q.x, q.normal, {}}));
  return out;
}

NonresonanceCertificate certify(const Spectrum& sp, const GramPair& g, const Mesh& m, std::span<const double> alpha,
                                std::span<const double> beta, int j) {
  if (sp.eigenvectors.rows() != g.size() || g.num_nodes != m.num_vertices()) {
    throw InvalidParameter("certify: spectrum, Gram pair and mesh disagree in size");
  }
  if (j < 1 || j + 1 > sp.count()) {
    throw InvalidParameter("certify: gap index j=" + std::to_string(j) + " needs j+1 <= " +
                           std::to_string(sp.count()) + " computed eigenvalues");
  }
  const auto quad = boundary_quadrature(m);
  if (alpha.size() != quad.size() || beta.size() != quad.size()) {
    throw InvalidParameter("certify: alpha/beta must be sampled at the " + std::to_string(quad.size()) +
                           " boundary quadrature points");
  }

  NonresonanceCertificate c;
  c.j = j;
  c.mu_j = sp.eigenvalues(j - 1);
  c.mu_j1 = sp.eigenvalues(j);
  c.cluster_j = cluster_around(sp, j - 1);
  if (c.cluster_j.back() >= j) {
    throw ResonanceError("resonant cluster: mu_" + std::to_string(j) + " and mu_" + std::to_string(j + 1) +
                         " coincide within relative 1e-8");
  }
  c.cluster_j1 = cluster_around(sp, j);
  if (c.cluster_j1.back() == sp.count() - 1 && sp.count() < sp.finite_count) {
    throw InvalidParameter("certify: the eigenspace of mu_" + std::to_string(j + 1) +
                           " may extend past the computed eigenpairs; request more");
  }
  auto width = [&](const std::vector<int>& cl) {
    return sp.eigenvalues(cl.back()) - sp.eigenvalues(cl.front());
  };
  c.cluster_width_j = width(c.cluster_j);
  c.cluster_width_j1 = width(c.cluster_j1);

  c.margin_alpha = std::numeric_limits<double>::infinity();
  c.margin_order = std::numeric_limits<double>::infinity();
  c.margin_beta = std::numeric_limits<double>::infinity();
  std::vector<double> w_alpha(quad.size()), w_beta(quad.size());
  for (std::size_t i = 0; i < quad.size(); ++i) {
    c.margin_alpha = std::min(c.margin_alpha, alpha[i] - c.mu_j);
    c.margin_order = std::min(c.margin_order, beta[i] - alpha[i]);
    c.margin_beta = std::min(c.margin_beta, c.mu_j1 - beta[i]);
    w_alpha[i] = alpha[i] - c.mu_j;
    w_beta[i] = c.mu_j1 - beta[i];
  }

  c.gram_j = weighted_trace_gram(sp, m, quad, c.cluster_j, w_alpha);
  c.gram_j1 = weighted_trace_gram(sp, m, quad, c.cluster_j1, w_beta);
  c.gram_min_j = min_eigenvalue(c.gram_j);
  c.gram_min_j1 = min_eigenvalue(c.gram_j1);

  if (c.margin_alpha < -kMarginTol) c.reasons.push_back("alpha drops below mu_j");
  if (c.margin_order < -kMarginTol) c.reasons.push_back("beta drops below alpha");
  if (c.margin_beta < -kMarginTol) c.reasons.push_back("beta exceeds mu_{j+1}");
  if (!(c.gram_min_j > kGramTol)) c.reasons.push_back("integral of (alpha - mu_j)|phi|^2 not positive on E_j");
  if (!(c.gram_min_j1 > kGramTol)) {
    c.reasons.push_back("integral of (mu_{j+1} - beta)|phi|^2 not positive on E_{j+1}");
  }
  c.pass = c.reasons.empty();
  return c;
}

SlopeEnvelope slope_scan(const BoundaryNonlinearity& g, const Mesh& m, std::span<const double> radii,
                         int directions) {
  if (radii.empty()) throw InvalidParameter("slope_scan: no radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw InvalidParameter("slope_scan: radii must be positive and increasing");
    }
  }
  if (directions < 1) throw InvalidParameter("slope_scan: directions must be >= 1");
  const int k = g.k();

  std::vector<std::vector<double>> dirs;
  if (k == 1) {
    dirs = {{1.0}, {-1.0}};
    if (directions == 1) dirs.resize(1);
  } else if (k == 2) {
    for (int i = 0; i < directions; ++i) {
      double t = 2.0 * std::numbers::pi * i / directions;
      dirs.push_back({std::cos(t), std::sin(t)});
    }
  } else {
    std::mt19937_64 rng(0x5eed5eedULL);
    std::normal_distribution<double> normal;
    for (int i = 0; i < directions; ++i) {
      std::vector<double> d(k);
      double nrm = 0.0;
      do {
        nrm = 0.0;
        for (double& x : d) {
          x = normal(rng);
          nrm += x * x;
        }
      } while (nrm == 0.0);
      for (double& x : d) x /= std::sqrt(nrm);
      dirs.push_back(std::move(d));
    }
  }

  const auto quad = boundary_quadrature(m);
  SlopeEnvelope env;
  env.radii.assign(radii.begin(), radii.end());
  env.point_min.assign(quad.size(), std::numeric_limits<double>::infinity());
  env.point_max.assign(quad.size(), -std::numeric_limits<double>::infinity());
  std::vector<double> u(k), gv(k);
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t qi = 0; qi < quad.size(); ++qi) {
      for (const auto& d : dirs) {
        for (int a = 0; a < k; ++a) u[a] = r * d[a];
        g.evaluate(EvalPoint{quad[qi].x, quad[qi].normal, u}, gv);
        double ratio = 0.0;
        for (int a = 0; a < k; ++a) ratio += gv[a] * u[a];
        ratio /= r * r;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        if (ri + 1 == radii.size()) {
          env.point_min[qi] = std::min(env.point_min[qi], ratio);
          env.point_max[qi] = std::max(env.point_max[qi], ratio);
        }
      }
    }
    env.min_by_radius.push_back(lo);
    env.max_by_radius.push_back(hi);
  }
  return env;
}

}  // namespace srlab

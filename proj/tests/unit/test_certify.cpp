#include <gtest/gtest.h>

#include <cmath>

#include "../support/generators.hpp"
#include "srlab/certify.hpp"
#include "srlab/error.hpp"
#include "srlab/quadrature.hpp"

using namespace srlab;

namespace {

struct RobinDisk {
  Mesh mesh = make_unit_disk(32, 8);
  GramPair g;
  Spectrum sp;
  RobinDisk() {
    g = assemble_gram(mesh, MatrixField::zero("A", Support::Interior, 1), MatrixField::identity("Sigma", Support::Boundary, 1),
                      MatrixField::zero("M", Support::Interior, 1), MatrixField::identity("P", Support::Boundary, 1));
    EigenOptions o;
    o.count = 6;
    sp = solve_eigs(g, o);
  }
  std::size_t nq() const { return boundary_quadrature(mesh).size(); }
  std::vector<double> constant(double c) const { return std::vector<double>(nq(), c); }
};

const RobinDisk& disk() {
  static const RobinDisk d;
  return d;
}

// Direct quadrature of int w <phi_p, phi_q> ds over the listed eigenpairs, scalar case.
Eigen::MatrixXd gram_oracle(const RobinDisk& d, const std::vector<int>& modes, const std::vector<double>& w) {
  auto quad = boundary_quadrature(d.mesh);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(modes.size()), static_cast<Eigen::Index>(modes.size()));
  for (std::size_t qi = 0; qi < quad.size(); ++qi) {
    const auto& q = quad[qi];
    const auto [a, b] = d.mesh.boundary_edges()[static_cast<std::size_t>(q.edge)].v;
    Eigen::VectorXd val(static_cast<Eigen::Index>(modes.size()));
    for (std::size_t p = 0; p < modes.size(); ++p)
      val(static_cast<Eigen::Index>(p)) = q.shape[0] * d.sp.eigenvectors(a, modes[p]) + q.shape[1] * d.sp.eigenvectors(b, modes[p]);
    G += q.weight * w[qi] * val * val.transpose();
  }
  return G;
}

}  // namespace

TEST(CertifyExamples, MidpointPasses) {
  const auto& d = disk();
  const double mid = 0.5 * (d.sp.eigenvalues(0) + d.sp.eigenvalues(1));
  auto a = d.constant(mid);
  auto c = certify(d.sp, d.g, d.mesh, a, a, 1);
  EXPECT_TRUE(c.pass);
  EXPECT_TRUE(c.reasons.empty());
  EXPECT_EQ(c.cluster_j, std::vector<int>{0});
  EXPECT_EQ(c.cluster_j1, (std::vector<int>{1, 2}));
  EXPECT_NEAR(c.margin_alpha, mid - d.sp.eigenvalues(0), 1e-12);
  EXPECT_GT(c.gram_min_j, 0.0);
  EXPECT_GT(c.gram_min_j1, 0.0);
}

TEST(CertifyExamples, AlphaOnTheEigenvalueFails) {
  const auto& d = disk();
  auto a = d.constant(d.sp.eigenvalues(0));
  auto b = d.constant(0.5 * (d.sp.eigenvalues(0) + d.sp.eigenvalues(1)));
  auto c = certify(d.sp, d.g, d.mesh, a, b, 1);
  EXPECT_FALSE(c.pass);
  EXPECT_NEAR(c.gram_min_j, 0.0, 1e-14);
  ASSERT_EQ(c.reasons.size(), 1u);
  EXPECT_NE(c.reasons[0].find("E_j"), std::string::npos);
}

TEST(CertifyExamples, AlphaTouchingOnHalfTheBoundaryPasses) {
  const auto& d = disk();
  const double mu1 = d.sp.eigenvalues(0), mu2 = d.sp.eigenvalues(1);
  const double mid = 0.5 * (mu1 + mu2);
  auto quad = boundary_quadrature(d.mesh);
  std::vector<double> a, b(quad.size(), mid);
  for (const auto& q : quad) a.push_back(q.x.y >= 0 ? mu1 : mid);
  auto c = certify(d.sp, d.g, d.mesh, a, b, 1);
  EXPECT_TRUE(c.pass);
  EXPECT_NEAR(c.margin_alpha, 0.0, 1e-14);
  // First mode is nearly constant, so roughly half the full Gram survives.
  EXPECT_GT(c.gram_min_j, 0.3 * (mid - mu1));
}

TEST(CertifyExamples, SandwichViolations) {
  const auto& d = disk();
  const double mu1 = d.sp.eigenvalues(0), mu2 = d.sp.eigenvalues(1);
  auto below = certify(d.sp, d.g, d.mesh, d.constant(mu1 - 0.1), d.constant(mu1 + 0.5), 1);
  EXPECT_FALSE(below.pass);
  EXPECT_NEAR(below.margin_alpha, -0.1, 1e-12);
  auto crossed = certify(d.sp, d.g, d.mesh, d.constant(1.8), d.constant(1.2), 1);
  EXPECT_FALSE(crossed.pass);
  EXPECT_LT(crossed.margin_order, 0.0);
  auto above = certify(d.sp, d.g, d.mesh, d.constant(mu1 + 0.1), d.constant(mu2 + 0.1), 1);
  EXPECT_FALSE(above.pass);
  EXPECT_NEAR(above.margin_beta, -0.1, 1e-12);
  EXPECT_LT(above.gram_min_j1, 0.0);
}

TEST(CertifyExamples, Preconditions) {
  const auto& d = disk();
  auto a = d.constant(1.5);
  EXPECT_THROW(certify(d.sp, d.g, d.mesh, a, a, 0), InvalidParameter);
  EXPECT_THROW(certify(d.sp, d.g, d.mesh, a, a, 6), InvalidParameter);
  std::vector<double> short_a(3, 1.5);
  EXPECT_THROW(certify(d.sp, d.g, d.mesh, short_a, short_a, 1), InvalidParameter);
  // mu_2 = mu_3 on the symmetric disk.
  EXPECT_THROW(certify(d.sp, d.g, d.mesh, a, a, 2), ResonanceError);
}

TEST(CertifyGram, ConstantWeightGivesScaledIdentity) {
  // With P = I the boundary-weighted inner product is exactly B, so the Gram is (c - mu) I.
  const auto& d = disk();
  const double mu1 = d.sp.eigenvalues(0), mu2 = d.sp.eigenvalues(1);
  auto c = certify(d.sp, d.g, d.mesh, d.constant(1.3), d.constant(1.7), 1);
  EXPECT_NEAR(c.gram_j(0, 0), 1.3 - mu1, 1e-10);
  EXPECT_LE((c.gram_j1 - (mu2 - 1.7) * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(CertifyGram, MatchesDirectQuadratureForRandomWeights) {
  const auto& d = disk();
  const double mu1 = d.sp.eigenvalues(0), mu2 = d.sp.eigenvalues(1);
  testgen::Rng rng(606);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> a, b, wa, wb;
    for (std::size_t i = 0; i < d.nq(); ++i) {
      const double lo = rng.uniform(mu1, 0.5 * (mu1 + mu2));
      a.push_back(lo);
      b.push_back(rng.uniform(lo, mu2));
      wa.push_back(a.back() - mu1);
      wb.push_back(mu2 - b.back());
    }
    auto c = certify(d.sp, d.g, d.mesh, a, b, 1);
    EXPECT_LE((c.gram_j - gram_oracle(d, c.cluster_j, wa)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((c.gram_j1 - gram_oracle(d, c.cluster_j1, wb)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(c.pass);
  }
}

TEST(CertifyGram, MonotoneInAlpha) {
  const auto& d = disk();
  const double mu1 = d.sp.eigenvalues(0), mu2 = d.sp.eigenvalues(1);
  testgen::Rng rng(17);
  std::vector<double> a(d.nq()), b = d.constant(mu2 - 0.1);
  for (double& v : a) v = rng.uniform(mu1, mu1 + 0.2);
  double prev = certify(d.sp, d.g, d.mesh, a, b, 1).gram_min_j;
  for (int step = 0; step < 5; ++step) {
    for (double& v : a) v += rng.uniform(0.0, 0.1);
    const double now = certify(d.sp, d.g, d.mesh, a, b, 1).gram_min_j;
    EXPECT_GE(now, prev - 1e-14);
    prev = now;
  }
}

TEST(CertifyBounds, Examples) {
  Mesh m = make_unit_square(2);
  auto I = MatrixField::identity("P", Support::Boundary, 2);
  auto s = build_alpha_beta(2, 3, I, m);
  ASSERT_EQ(s.alpha.size(), boundary_quadrature(m).size());
  for (std::size_t i = 0; i < s.alpha.size(); ++i) {
    EXPECT_NEAR(s.alpha[i], 2.0, 1e-15);
    EXPECT_NEAR(s.beta[i], 3.0, 1e-15);
  }
  std::vector<double> ones{1, 1, 1, 1};
  auto J = MatrixField::constant("P", Support::Boundary, 2, ones);
  auto t = build_alpha_beta(1, 1, J, m);
  for (std::size_t i = 0; i < t.alpha.size(); ++i) {
    EXPECT_NEAR(t.alpha[i], 0.0, 1e-14);
    EXPECT_NEAR(t.beta[i], 2.0, 1e-14);
  }
  auto r = build_alpha_beta(3, 2, I, m);
  EXPECT_GT(r.alpha[0], r.beta[0]);
  EXPECT_THROW(build_alpha_beta(0, 1, I, m), InvalidParameter);
  EXPECT_THROW(build_alpha_beta(1, 1, MatrixField::identity("M", Support::Interior, 2), m), InvalidParameter);
}

TEST(CertifyBounds, SwappedBoundsFailTheSandwich) {
  const auto& d = disk();
  auto s = build_alpha_beta(1.7, 1.3, MatrixField::identity("P", Support::Boundary, 1), d.mesh);
  auto c = certify(d.sp, d.g, d.mesh, s.alpha, s.beta, 1);
  EXPECT_FALSE(c.pass);
  EXPECT_NEAR(c.margin_order, -0.4, 1e-12);
}

TEST(CertifySampling, BoundaryCoefficient) {
  Mesh m = make_unit_square(1);
  auto v = sample_on_boundary(parse("x1 + 10*n2", 1), m);
  auto quad = boundary_quadrature(m);
  ASSERT_EQ(v.size(), quad.size());
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], quad[i].x.x + 10 * quad[i].normal.y, 1e-15);
  EXPECT_THROW(sample_on_boundary(parse("u1", 1), m), InvalidParameter);
}

TEST(SlopeScan, LinearIsExact) {
  Mesh m = make_unit_square(2);
  std::vector<double> radii{1, 10, 100};
  for (int k : {1, 2, 3}) {
    std::vector<std::string> src;
    for (int a = 1; a <= k; ++a) src.push_back("2.5*u" + std::to_string(a));
    auto env = slope_scan(BoundaryNonlinearity::parse(src), m, radii, 6);
    EXPECT_FALSE(env.certifying);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      EXPECT_NEAR(env.min_by_radius[i], 2.5, 1e-13);
      EXPECT_NEAR(env.max_by_radius[i], 2.5, 1e-13);
    }
  }
}

TEST(SlopeScan, BoundedPerturbationsFade) {
  Mesh m = make_unit_disk(8, 1);
  std::vector<double> radii{1, 10, 1000};
  auto env = slope_scan(BoundaryNonlinearity::parse({"2*u1 + sin(u1)"}), m, radii, 2);
  EXPECT_NEAR(env.min_by_radius.back(), 2.0, 1e-3);
  EXPECT_NEAR(env.max_by_radius.back(), 2.0, 1e-3);
  EXPECT_NEAR(env.min_by_radius.front(), 2.0 + std::sin(1.0), 1e-12);

  std::vector<double> far{1e3, 1e6};
  auto bounded = slope_scan(BoundaryNonlinearity::parse({"atan(u1)"}), m, far, 2);
  EXPECT_LE(std::abs(bounded.max_by_radius.back()), 2e-6);
  EXPECT_EQ(bounded.point_min.size(), boundary_quadrature(m).size());
}

TEST(SlopeScan, DirectionalSlopes) {
  // <g(U), U>/|U|^2 with g = (u1, 3 u2) ranges over [1, 3].
  Mesh m = make_unit_square(1);
  std::vector<double> radii{5};
  auto env = slope_scan(BoundaryNonlinearity::parse({"u1", "3*u2"}), m, radii, 16);
  EXPECT_NEAR(env.min_by_radius[0], 1.0, 1e-12);
  EXPECT_NEAR(env.max_by_radius[0], 3.0, 1e-12);
}

TEST(SlopeScan, Preconditions) {
  Mesh m = make_unit_square(1);
  auto g = BoundaryNonlinearity::parse({"u1"});
  EXPECT_THROW(slope_scan(g, m, std::vector<double>{}, 4), InvalidParameter);
  EXPECT_THROW(slope_scan(g, m, std::vector<double>{10, 1}, 4), InvalidParameter);
  EXPECT_THROW(slope_scan(g, m, std::vector<double>{1}, 0), InvalidParameter);
}

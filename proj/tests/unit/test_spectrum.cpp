#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "../support/generators.hpp"
#include "srlab/error.hpp"
#include "srlab/linalg.hpp"
#include "srlab/oracle.hpp"
#include "srlab/spectrum.hpp"

using namespace srlab;

namespace {

GramPair scalar_disk(int s, int r, const char* sigma, const char* M = "0", const char* P = "1") {
  Mesh m = make_unit_disk(s, r);
  return assemble_gram(m, MatrixField::zero("A", Support::Interior, 1),
                       MatrixField::from_strings("Sigma", Support::Boundary, {{sigma}}),
                       MatrixField::from_strings("M", Support::Interior, {{M}}),
                       MatrixField::from_strings("P", Support::Boundary, {{P}}));
}

Eigen::MatrixXd dense(const SparseMatrix& a) { return Eigen::MatrixXd(a); }

// Lowest finite eigenvalues of the pencil by brute force: eliminate the B-null
// space explicitly with a dense Schur complement, then solve the SPD pencil
// with Eigen's generalized solver.
std::vector<double> dense_reference(const GramPair& g, int count) {
  Eigen::MatrixXd S = dense(g.S), B = dense(g.B);
  const Eigen::Index n = S.rows();
  std::vector<Eigen::Index> w, z;
  for (Eigen::Index i = 0; i < n; ++i) (B.row(i).cwiseAbs().maxCoeff() > 0 ? w : z).push_back(i);
  auto pick = [](const Eigen::MatrixXd& a, const std::vector<Eigen::Index>& r, const std::vector<Eigen::Index>& c) {
    Eigen::MatrixXd out(r.size(), c.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j) out(i, j) = a(r[i], c[j]);
    return out;
  };
  Eigen::MatrixXd Sww = pick(S, w, w);
  if (!z.empty()) Sww -= pick(S, w, z) * pick(S, z, z).ldlt().solve(pick(S, z, w));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Sww, pick(B, w, w));
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  out.resize(static_cast<std::size_t>(count));
  return out;
}

}  // namespace

TEST(SpectrumDisk, SteklovNeumann) {
  auto g = scalar_disk(64, 16, "0");
  EigenOptions o;
  o.count = 5;
  auto sp = solve_eigs(g, o);
  auto exact = oracle::disk_steklov_exact(5, 0.0);
  ASSERT_EQ(sp.count(), 5);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(sp.eigenvalues(i), exact[static_cast<std::size_t>(i)], 0.02) << i;
  EXPECT_GT(sp.shift_used, 0.0);  // S alone is singular on constants
  EXPECT_EQ(sp.kernel_dim + sp.finite_count, g.size());
}

TEST(SpectrumDisk, SteklovRobin) {
  auto g = scalar_disk(64, 16, "1");
  EigenOptions o;
  o.count = 5;
  auto sp = solve_eigs(g, o);
  auto exact = oracle::disk_steklov_exact(5, 1.0);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(sp.eigenvalues(i), exact[static_cast<std::size_t>(i)], 0.05) << i;
  EXPECT_EQ(sp.shift_used, 0.0);
}

TEST(SpectrumDisk, DecoupledPairIsTheMergedSpectrum) {
  Mesh m = make_unit_disk(32, 8);
  auto A = MatrixField::zero("A", Support::Interior, 2);
  auto g2 = assemble_gram(m, A, MatrixField::from_strings("Sigma", Support::Boundary, {{"1", "0"}, {"0", "2"}}),
                          MatrixField::zero("M", Support::Interior, 2), MatrixField::identity("P", Support::Boundary, 2));
  EigenOptions o;
  o.count = 8;
  auto sp = solve_eigs(g2, o);
  auto a = solve_eigs(scalar_disk(32, 8, "1"), o);
  auto b = solve_eigs(scalar_disk(32, 8, "2"), o);
  std::vector<double> va(a.eigenvalues.data(), a.eigenvalues.data() + 8);
  std::vector<double> vb(b.eigenvalues.data(), b.eigenvalues.data() + 8);
  auto merged = oracle::decoupled_union(va, vb);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(sp.eigenvalues(i), merged[static_cast<std::size_t>(i)], 1e-9);
}

TEST(SpectrumSolve, AgreesWithDenseReference) {
  Mesh m = make_unit_disk(12, 3);
  auto g = assemble_gram(m, MatrixField::from_strings("A", Support::Interior, {{"1 + x1^2", "0.2"}, {"0.2", "1"}}),
                         MatrixField::from_strings("Sigma", Support::Boundary, {{"0.5", "0"}, {"0", "x2^2"}}),
                         MatrixField::from_strings("M", Support::Interior, {{"max(x1, 0)", "0"}, {"0", "0"}}),
                         MatrixField::from_strings("P", Support::Boundary, {{"1", "0.3"}, {"0.3", "1 + x1^2"}}));
  EigenOptions o;
  o.count = 12;
  auto sp = solve_eigs(g, o);
  auto ref = dense_reference(g, 12);
  for (int i = 0; i < 12; ++i)
    EXPECT_NEAR(sp.eigenvalues(i), ref[static_cast<std::size_t>(i)], 1e-9 * std::max(1.0, ref[static_cast<std::size_t>(i)]));
  EXPECT_LE(sp.orthonormality_error, 1e-10);
  EXPECT_LE(sp.diagonality_error, 1e-8 * std::max(1.0, sp.eigenvalues.cwiseAbs().maxCoeff()));
}

TEST(SpectrumSolve, ShiftDoesNotMoveEigenvalues) {
  auto g = scalar_disk(24, 6, "1");
  EigenOptions a;
  a.count = 6;
  EigenOptions b = a;
  b.shift = 2.5;
  auto s0 = solve_eigs(g, a);
  auto s1 = solve_eigs(g, b);
  EXPECT_EQ(s1.shift_used, 2.5);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(s0.eigenvalues(i), s1.eigenvalues(i), 1e-9);
}

TEST(SpectrumSolve, EigenvectorsSatisfyThePencil) {
  auto g = scalar_disk(20, 5, "0.5", "1");
  EigenOptions o;
  o.count = 6;
  auto sp = solve_eigs(g, o);
  for (int i = 0; i < sp.count(); ++i) {
    Eigen::VectorXd phi = sp.eigenvectors.col(i);
    Eigen::VectorXd r = g.S * phi - sp.eigenvalues(i) * (g.B * phi);
    EXPECT_LE(r.norm(), 1e-9 * std::max(1.0, sp.eigenvalues(i)));
    EXPECT_NEAR(phi.dot(g.B * phi), 1.0, 1e-10);
  }
}

TEST(SpectrumSolve, CountBeyondFiniteEigenvalues) {
  Mesh m = make_unit_square(2);
  auto g = assemble_gram(m, MatrixField::zero("A", Support::Interior, 1), MatrixField::identity("Sigma", Support::Boundary, 1),
                         MatrixField::zero("M", Support::Interior, 1), MatrixField::identity("P", Support::Boundary, 1));
  EigenOptions o;
  o.count = 9;
  EXPECT_THROW(solve_eigs(g, o), InvalidParameter);
  o.clamp_count = true;
  auto sp = solve_eigs(g, o);
  EXPECT_EQ(sp.count(), 8);
  EXPECT_EQ(sp.kernel_dim, 1);
  EXPECT_EQ(sp.finite_count, 8);
}

TEST(SpectrumKernel, Examples) {
  Mesh m = make_unit_square(2);
  auto Z = [](const char* n, Support s, int k) { return MatrixField::zero(n, s, k); };
  auto I = [](const char* n, Support s, int k) { return MatrixField::identity(n, s, k); };
  for (int k : {1, 2}) {
    auto full = assemble_gram(m, I("A", Support::Interior, k), Z("Sigma", Support::Boundary, k), I("M", Support::Interior, k),
                              Z("P", Support::Boundary, k));
    EXPECT_EQ(hmp_kernel(full).dimension, 0);
    auto bdry = assemble_gram(m, I("A", Support::Interior, k), Z("Sigma", Support::Boundary, k), Z("M", Support::Interior, k),
                              I("P", Support::Boundary, k));
    auto kb = hmp_kernel(bdry);
    EXPECT_EQ(kb.dimension, k);
    EXPECT_LE((dense(bdry.B) * kb.basis).cwiseAbs().maxCoeff(), 1e-14);
    auto none = assemble_gram(m, I("A", Support::Interior, k), Z("Sigma", Support::Boundary, k), Z("M", Support::Interior, k),
                              Z("P", Support::Boundary, k));
    EXPECT_EQ(hmp_kernel(none).dimension, 9 * k);
  }
}

TEST(SpectrumKernel, MatchesTheSolverSplit) {
  auto g = scalar_disk(16, 4, "1", "max(x1, 0)");
  auto kb = hmp_kernel(g);
  EigenOptions o;
  o.count = 3;
  auto sp = solve_eigs(g, o);
  EXPECT_EQ(kb.dimension, sp.kernel_dim);
  EXPECT_LE((kb.basis.transpose() * kb.basis - Eigen::MatrixXd::Identity(kb.dimension, kb.dimension)).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(SpectrumExpand, Examples) {
  auto g = scalar_disk(24, 6, "1");
  EigenOptions o;
  o.count = 6;
  auto sp = solve_eigs(g, o);
  auto e1 = expand(sp, g, sp.eigenvectors.col(0));
  EXPECT_NEAR(e1.coefficients(0), 1.0, 1e-10);
  EXPECT_LE(e1.coefficients.tail(5).cwiseAbs().maxCoeff(), 1e-10);
  Eigen::VectorXd U = 2 * sp.eigenvectors.col(0) + 3 * sp.eigenvectors.col(1);
  auto e2 = expand(sp, g, U);
  EXPECT_NEAR(e2.coefficients(0), 2.0, 1e-10);
  EXPECT_NEAR(e2.coefficients(1), 3.0, 1e-10);
  EXPECT_LE(e2.formula_discrepancy, 1e-8);
  EXPECT_LE(e2.remainder_norm, 1e-9);
}

TEST(SpectrumExpand, RandomSpanReconstruction) {
  auto g = scalar_disk(24, 6, "1");
  EigenOptions o;
  o.count = 10;
  auto sp = solve_eigs(g, o);
  testgen::Rng rng(314);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd c = rng.vector(10);
    Eigen::VectorXd U = sp.eigenvectors * c;
    auto e = expand(sp, g, U);
    Eigen::VectorXd d = U - sp.eigenvectors * e.coefficients;
    EXPECT_LE(std::sqrt(std::max(0.0, d.dot(g.B * d))), 1e-8);
    auto p = parseval_check(sp, g, U);
    EXPECT_LE(p.energy, 1e-8);
    EXPECT_LE(p.mass, 1e-8);
  }
  auto z = parseval_check(sp, g, Eigen::VectorXd::Zero(g.size()));
  EXPECT_EQ(z.energy, 0.0);
  EXPECT_EQ(z.mass, 0.0);
  auto p1 = parseval_check(sp, g, sp.eigenvectors.col(0));
  EXPECT_LE(p1.energy, 1e-8);
}

TEST(SpectrumSign, DiskModes) {
  Mesh m = make_unit_disk(32, 8);
  auto g = assemble_gram(m, MatrixField::zero("A", Support::Interior, 1), MatrixField::identity("Sigma", Support::Boundary, 1),
                         MatrixField::zero("M", Support::Interior, 1), MatrixField::identity("P", Support::Boundary, 1));
  EigenOptions o;
  o.count = 4;
  auto sp = solve_eigs(g, o);
  EXPECT_EQ(sign_check_first(sp, m).status, SignVerdict::Status::OneSigned);

  Spectrum swapped = sp;
  swapped.eigenvalues(0) = sp.eigenvalues(0);
  swapped.eigenvectors.col(0) = sp.eigenvectors.col(1);
  EXPECT_EQ(sign_check_first(swapped, m).status, SignVerdict::Status::SignChange);

  Spectrum tied = sp;
  tied.eigenvalues(1) = tied.eigenvalues(0);
  EXPECT_EQ(sign_check_first(tied, m).status, SignVerdict::Status::InconclusiveMultiple);
}

TEST(LinalgSymmetricEigen, AgreesWithEigen) {
  testgen::Rng rng(2718);
  for (int t = 0; t < 40; ++t) {
    const int n = rng.integer(1, 40);
    Eigen::MatrixXd a = rng.symmetric(n);
    auto mine = symmetric_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    EXPECT_LE((mine.values - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12 * scale * n);
    EXPECT_LE((mine.vectors.transpose() * mine.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12 * n);
    EXPECT_LE((a * mine.vectors - mine.vectors * mine.values.asDiagonal()).cwiseAbs().maxCoeff(), 1e-11 * scale * n);
  }
}

TEST(LinalgSymmetricEigen, RepeatedAndTrivial) {
  auto id = symmetric_eigen(Eigen::MatrixXd::Identity(5, 5) * 3.0);
  EXPECT_LE((id.values.array() - 3.0).abs().maxCoeff(), 1e-15);
  auto z = symmetric_eigen(Eigen::MatrixXd::Zero(3, 3));
  EXPECT_EQ(z.values.cwiseAbs().maxCoeff(), 0.0);
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 1, 0;
  auto s = symmetric_eigen(a);
  EXPECT_NEAR(s.values(0), -1.0, 1e-15);
  EXPECT_NEAR(s.values(1), 1.0, 1e-15);
}

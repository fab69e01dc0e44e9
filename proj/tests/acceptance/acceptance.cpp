// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "srlab/certify.hpp"
#include "srlab/config.hpp"
#include "srlab/oracle.hpp"
#include "srlab/quadrature.hpp"
#include "srlab/solve.hpp"
#include "srlab/spectrum.hpp"

using namespace srlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Problem {
  Mesh mesh;
  GramPair g;
};

Problem from_config(const std::string& text) {
  RunConfig c = parse_config(text);
  Problem p{build_mesh(c.domain), {}};
  p.g = assemble_gram(p.mesh, c.A, c.Sigma, c.M, c.P);
  return p;
}

std::string scalar_disk_config(int s, int r, double sigma) {
  std::ostringstream os;
  os << R"j({"domain": {"type": "unit-disk", "sectors": )j" << s << R"j(, "rings": )j" << r << R"j(},
    "weights": {"A": {"constant": [0]}, "Sigma": {"constant": [)j"
     << sigma << R"j(]}, "M": {"constant": [0]}, "P": {"constant": [1]}}})j";
  return os.str();
}

Spectrum eigs(const GramPair& g, int count) {
  EigenOptions o;
  o.count = count;
  return solve_eigs(g, o);
}

double max_abs_diff(const Eigen::VectorXd& a, const std::vector<double>& b) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a(i) - b[static_cast<std::size_t>(i)]));
  return d;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  auto p = from_config(scalar_disk_config(64, 16, 0.0));
  auto sp = eigs(p.g, 5);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double err = max_abs_diff(sp.eigenvalues, oracle::disk_steklov_exact(5, 0.0));
  return {err <= 0.02 && secs <= 60.0, "max |mu - exact| = " + fmt(err) + " (tol 0.02), " + fmt(secs) + " s (limit 60)"};
}

Outcome criterion2() {
  auto s0 = eigs(from_config(scalar_disk_config(64, 16, 0.0)).g, 5);
  auto s1 = eigs(from_config(scalar_disk_config(64, 16, 1.0)).g, 5);
  const double err = max_abs_diff(s1.eigenvalues, oracle::disk_steklov_exact(5, 1.0));
  double shift = 0.0;
  for (int n = 0; n < 5; ++n) shift = std::max(shift, std::abs(s1.eigenvalues(n) - 1.0 - s0.eigenvalues(n)));
  return {err <= 0.05 && shift <= 0.02,
          "max |mu - exact| = " + fmt(err) + " (tol 0.05), max shift defect = " + fmt(shift) + " (tol 0.02)"};
}

Outcome criterion3() {
  std::vector<Spectrum> sp;
  for (int f : {1, 2, 4}) sp.push_back(eigs(from_config(scalar_disk_config(32 * f, 8 * f, 0.0)).g, 5));
  const auto exact = oracle::disk_steklov_exact(5, 0.0);
  bool pass = true;
  std::string detail = "orders";
  for (int n = 1; n < 5; ++n) {
    double e[3];
    for (int l = 0; l < 3; ++l) e[l] = std::abs(sp[static_cast<std::size_t>(l)].eigenvalues(n) - exact[static_cast<std::size_t>(n)]);
    const double p1 = std::log2(e[0] / e[1]);
    const double p2 = std::log2(e[1] / e[2]);
    pass = pass && e[0] > e[1] && e[1] > e[2] && p1 >= 1.5 && p1 <= 2.5 && p2 >= 1.5 && p2 <= 2.5;
    detail += " mu" + std::to_string(n + 1) + "=" + fmt(p1) + "/" + fmt(p2);
  }
  return {pass, detail + " (monotone, band [1.5, 2.5])"};
}

Outcome criterion4() {
  std::vector<std::pair<std::string, std::string>> configs{
      {"disk sigma=0", scalar_disk_config(32, 8, 0.0)},
      {"disk sigma=1", scalar_disk_config(32, 8, 1.0)},
      {"decoupled pair", R"j({"domain": {"type": "unit-disk", "sectors": 32, "rings": 8}, "k": 2,
        "weights": {"Sigma": {"constant": [1, 0, 0, 2]}, "P": {"constant": [1, 0, 0, 1]}}})j"},
      {"interior mass", R"j({"domain": {"type": "unit-square", "n": 12},
        "weights": {"M": {"constant": [1]}}})j"},
      {"coupled variable", R"j({"domain": {"type": "unit-square", "n": 10}, "k": 2,
        "weights": {"A": {"entries": [["1 + x1^2", "0.25"], ["0.25", "1"]]},
                    "Sigma": {"entries": [["0.5", "0"], ["0", "x2^2"]]},
                    "M": {"entries": [["max(x1 - 0.5, 0)", "0"], ["0", "0"]]},
                    "P": {"entries": [["1", "0.5*x1"], ["0.5*x1", "1"]]}}})j"},
  };
  std::mt19937_64 rng(20261014);
  std::normal_distribution<double> normal;
  bool pass = true;
  double worst_orth = 0, worst_diag = 0, worst_pars = 0;
  for (const auto& [name, text] : configs) {
    auto p = from_config(text);
    auto sp = eigs(p.g, 10);
    Eigen::MatrixXd Phi = sp.eigenvectors;
    const double orth = (Phi.transpose() * (p.g.B * Phi) - Eigen::MatrixXd::Identity(sp.count(), sp.count())).cwiseAbs().maxCoeff();
    Eigen::MatrixXd D = Phi.transpose() * (p.g.S * Phi);
    D.diagonal() -= sp.eigenvalues;
    const double diag = D.cwiseAbs().maxCoeff() / std::max(1.0, sp.eigenvalues.cwiseAbs().maxCoeff());
    double pars = 0.0;
    for (int t = 0; t < 50; ++t) {
      Eigen::VectorXd c(sp.count());
      for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
      auto r = parseval_check(sp, p.g, Phi * c);
      pars = std::max({pars, r.energy, r.mass});
    }
    worst_orth = std::max(worst_orth, orth);
    worst_diag = std::max(worst_diag, diag);
    worst_pars = std::max(worst_pars, pars);
    pass = pass && orth <= 1e-8 && diag <= 1e-6 && pars <= 1e-8;
  }
  return {pass, std::to_string(configs.size()) + " configs: orth " + fmt(worst_orth) + " (tol 1e-8), diag " +
                    fmt(worst_diag) + " (tol 1e-6 max(1,mu_max)), Parseval " + fmt(worst_pars) + " (tol 1e-8)"};
}

Outcome criterion5() {
  bool pass = true;
  std::string detail;
  for (int k : {1, 2, 3}) {
    Mesh m = make_unit_square(2);
    const int interior = m.num_vertices() - static_cast<int>(boundary_nodes(m).size());
    auto bdry = assemble_gram(m, MatrixField::zero("A", Support::Interior, k), MatrixField::zero("Sigma", Support::Boundary, k),
                              MatrixField::zero("M", Support::Interior, k), MatrixField::identity("P", Support::Boundary, k));
    auto full = assemble_gram(m, MatrixField::zero("A", Support::Interior, k), MatrixField::zero("Sigma", Support::Boundary, k),
                              MatrixField::identity("M", Support::Interior, k), MatrixField::zero("P", Support::Boundary, k));
    const int d1 = hmp_kernel(bdry).dimension, d0 = hmp_kernel(full).dimension;
    pass = pass && d1 == k * interior && d0 == 0;
    detail += "k=" + std::to_string(k) + ": " + std::to_string(d1) + "/" + std::to_string(k * interior) + " and " +
              std::to_string(d0) + "/0; ";
  }
  return {pass, detail + "exact match required"};
}

Outcome criterion6() {
  auto pair = from_config(R"j({"domain": {"type": "unit-disk", "sectors": 32, "rings": 8}, "k": 2,
      "weights": {"A": {"constant": [0, 0, 0, 0.5]}, "Sigma": {"constant": [1, 0, 0, 0.25]},
                  "P": {"constant": [1, 0, 0, 2]}}})j");
  auto a = eigs(from_config(R"j({"domain": {"type": "unit-disk", "sectors": 32, "rings": 8},
      "weights": {"Sigma": {"constant": [1]}, "P": {"constant": [1]}}})j").g, 8);
  auto b = eigs(from_config(R"j({"domain": {"type": "unit-disk", "sectors": 32, "rings": 8},
      "weights": {"A": {"constant": [0.5]}, "Sigma": {"constant": [0.25]}, "P": {"constant": [2]}}})j").g, 8);
  auto sp = eigs(pair.g, 8);
  std::vector<double> va(a.eigenvalues.data(), a.eigenvalues.data() + 8), vb(b.eigenvalues.data(), b.eigenvalues.data() + 8);
  const double err = max_abs_diff(sp.eigenvalues, oracle::decoupled_union(va, vb));
  return {err <= 1e-9, "max |mu - merged| = " + fmt(err) + " over 8 eigenvalues (tol 1e-9)"};
}

struct RobinDisk {
  Problem p;
  Spectrum sp;
  std::vector<BoundaryQuadPoint> quad;
};

RobinDisk robin_disk() {
  RobinDisk d{from_config(scalar_disk_config(64, 16, 1.0)), {}, {}};
  d.sp = eigs(d.p.g, 6);
  d.quad = boundary_quadrature(d.p.mesh);
  return d;
}

Outcome criterion7(const RobinDisk& d) {
  const double mu1 = d.sp.eigenvalues(0), mu2 = d.sp.eigenvalues(1), mid = 0.5 * (mu1 + mu2);
  const std::size_t nq = d.quad.size();
  std::vector<double> midv(nq, mid), onv(nq, mu1), half;
  for (const auto& q : d.quad) half.push_back(q.x.y >= 0 ? mu1 : mid);
  auto c1 = certify(d.sp, d.p.g, d.p.mesh, midv, midv, 1);
  auto c2 = certify(d.sp, d.p.g, d.p.mesh, onv, midv, 1);
  auto c3 = certify(d.sp, d.p.g, d.p.mesh, half, midv, 1);
  const bool pass = c1.pass && !c2.pass && std::abs(c2.gram_min_j) <= 1e-12 && c3.pass;
  return {pass, std::string("midpoint ") + (c1.pass ? "PASS" : "FAIL") + ", alpha=mu_j " + (c2.pass ? "PASS" : "FAIL") +
                    " (gram " + fmt(c2.gram_min_j) + "), half-boundary " + (c3.pass ? "PASS" : "FAIL") + " (gram " +
                    fmt(c3.gram_min_j) + ", alpha margin " + fmt(c3.margin_alpha) + ")"};
}

Outcome criterion8(const RobinDisk& d, double* w_energy) {
  std::string detail;
  // (i) linear g with slope inside the gap and no forcing.
  auto lin = homotopy_solve(d.p.g, BoundaryNonlinearity::parse({"1.4*u1"}), d.p.mesh, 1.5);
  const double e1 = energy_norm(d.p.g, lin.U);
  const bool ok1 = lin.status == HomotopyStatus::Converged && e1 <= 1e-10;
  detail += "(i) |U|_S = " + fmt(e1) + " (tol 1e-10); ";

  // (ii) manufactured harmonic case.
  auto mc = oracle::manufactured_case("harmonic_robin_disk");
  auto ac = oracle::assemble_case(mc);
  HomotopyOptions ho;
  ho.steps = 10;
  auto tr = homotopy_solve(ac.gram, ac.g, ac.mesh, mc.delta, ho);
  const double terr = oracle::relative_trace_error(ac.mesh, tr.U, mc.exact);
  double worst_res = 0.0;
  for (const auto& s : tr.steps) worst_res = std::max(worst_res, s.residual);
  const int lambda_steps = static_cast<int>(tr.steps.size()) - 1;
  const bool ok2 = tr.status == HomotopyStatus::Converged && terr <= 2e-2 && worst_res <= 1e-10 && lambda_steps == 10;
  *w_energy = energy_norm(ac.gram, tr.U);
  detail += "(ii) trace error " + fmt(terr) + " (tol 2e-2), max step residual " + fmt(worst_res) + " (tol 1e-10), " +
            std::to_string(lambda_steps) + " steps; ";

  // (iii) bounded perturbation against damped Picard.
  auto gnl = BoundaryNonlinearity::parse({"1.5*u1 + 0.25*atan(u1) + cos(x1)"});
  auto nt = homotopy_solve(d.p.g, gnl, d.p.mesh, 1.5);
  auto pic = picard_solve(d.p.g, gnl, d.p.mesh, 1.625);
  const double diff = energy_norm(d.p.g, nt.U - pic.U) / energy_norm(d.p.g, pic.U);
  const bool ok3 = nt.status == HomotopyStatus::Converged && pic.converged && diff <= 1e-6;
  detail += "(iii) |U - U_picard|_S / |U_picard|_S = " + fmt(diff) + " (tol 1e-6)";
  return {ok1 && ok2 && ok3, detail};
}

Outcome criterion9(double w_energy) {
  auto mc = oracle::manufactured_case("harmonic_robin_disk");
  auto ac = oracle::assemble_case(mc);
  HomotopyOptions ho;
  ho.cap = 0.5 * w_energy;
  auto tr = homotopy_solve(ac.gram, ac.g, ac.mesh, mc.delta, ho);
  return {tr.status == HomotopyStatus::BoundExceeded,
          std::string("status ") + to_string(tr.status) + " with cap " + fmt(*ho.cap) + " = 0.5 |w_h|_S, tripped at lambda " +
              fmt(tr.failed_lambda)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int n, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
    return o.pass;
  };
  report(1, criterion1);
  report(2, criterion2);
  report(3, criterion3);
  report(4, criterion4);
  report(5, criterion5);
  report(6, criterion6);
  const RobinDisk d = robin_disk();
  double w_energy = 0.0;
  const bool p7 = report(7, [&] { return criterion7(d); });
  const bool p8 = report(8, [&] { return criterion8(d, &w_energy); });
  const bool p9 = report(9, [&] { return criterion9(w_energy); });
  report(10, [&] {
    return Outcome{p7 && p8 && p9, "composite of criteria 7, 8, 9 (certificate, homotopy completion, energy bound)"};
  });
  return failures == 0 ? 0 : 1;
}

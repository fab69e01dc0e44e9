#include "srlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "srlab/error.hpp"
#include "srlab/expr.hpp"
#include "srlab/quadrature.hpp"
#include "srlab/weights.hpp"

namespace srlab::oracle {

std::vector<double> disk_steklov_exact(int n_modes, double sigma) {
  if (n_modes < 1) throw InvalidParameter("disk_steklov_exact: n_modes must be >= 1");
  if (!(sigma >= 0.0)) throw InvalidParameter("disk_steklov_exact: sigma must be >= 0");
  std::vector<double> mu{sigma};
  for (int n = 1; static_cast<int>(mu.size()) < n_modes; ++n) {
    mu.push_back(sigma + n);
    mu.push_back(sigma + n);
  }
  mu.resize(static_cast<std::size_t>(n_modes));
  return mu;
}

std::vector<double> decoupled_union(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), out.begin());
  return out;
}

namespace {

std::vector<std::vector<std::string>> diag_rows(const std::vector<std::string>& d) {
  std::vector<std::vector<std::string>> rows(d.size(), std::vector<std::string>(d.size(), "0"));
  for (std::size_t i = 0; i < d.size(); ++i) rows[i][i] = d[i];
  return rows;
}

// With w harmonic and Sigma = s on the boundary: g = dw/dnu + s w + c (u - w).
OracleCase harmonic_robin_disk() {
  OracleCase c;
  c.id = "harmonic_robin_disk";
  c.description = "k=1, A=0, Sigma=1, M=0, P=1 on the unit disk polygon; w = x1^2 - x2^2";
  c.k = 1;
  c.A = diag_rows({"0"});
  c.Sigma = diag_rows({"1"});
  c.M = diag_rows({"0"});
  c.P = diag_rows({"1"});
  c.exact = {"x1^2 - x2^2"};
  c.delta = 1.5;
  c.g = {"(2*x1*n1 - 2*x2*n2) + (x1^2 - x2^2) + 1.5*(u1 - (x1^2 - x2^2))"};
  return c;
}

OracleCase decoupled_pair_disk() {
  OracleCase c;
  c.id = "decoupled_pair_disk";
  c.description = "k=2, A=0, Sigma=diag(1,2), M=0, P=I on the unit disk polygon; w = (x1^2 - x2^2, x1*x2)";
  c.k = 2;
  c.A = diag_rows({"0", "0"});
  c.Sigma = diag_rows({"1", "2"});
  c.M = diag_rows({"0", "0"});
  c.P = diag_rows({"1", "1"});
  c.exact = {"x1^2 - x2^2", "x1*x2"};
  c.delta = 1.5;
  c.g = {"(2*x1*n1 - 2*x2*n2) + (x1^2 - x2^2) + 1.5*(u1 - (x1^2 - x2^2))",
         "(x2*n1 + x1*n2) + 2*x1*x2 + 1.5*(u2 - x1*x2)"};
  return c;
}

}  // namespace

std::vector<std::string> manufactured_case_ids() { return {"harmonic_robin_disk", "decoupled_pair_disk"}; }

OracleCase manufactured_case(const std::string& id) {
  if (id == "harmonic_robin_disk") return harmonic_robin_disk();
  if (id == "decoupled_pair_disk") return decoupled_pair_disk();
  throw InvalidParameter("unknown manufactured case '" + id + "'");
}

SelfCheck self_check(const OracleCase& c) {
  const int k = c.k;
  std::vector<Expr> w, dxx, dyy, dx, dy, g;
  for (const auto& s : c.exact) {
    Expr e = parse_coefficient(s);
    Expr ex = diff_x(e, 0), ey = diff_x(e, 1);
    w.push_back(e);
    dx.push_back(ex);
    dy.push_back(ey);
    dxx.push_back(diff_x(ex, 0));
    dyy.push_back(diff_x(ey, 1));
  }
  for (const auto& s : c.g) g.push_back(parse(s, k));
  auto coeff = [](const std::vector<std::vector<std::string>>& rows) {
    std::vector<Expr> out;
    for (const auto& r : rows)
      for (const auto& s : r) out.push_back(parse_coefficient(s));
    return out;
  };
  const auto A = coeff(c.A);
  const auto Sigma = coeff(c.Sigma);

  SelfCheck out;
  std::vector<double> wv(static_cast<std::size_t>(k));
  for (int i = 0; i <= 10; ++i) {
    for (int jj = 0; jj <= 10; ++jj) {
      Point x{-1.0 + 0.2 * i, -1.0 + 0.2 * jj};
      if (x.x * x.x + x.y * x.y > 1.0) continue;
      for (int a = 0; a < k; ++a) wv[a] = w[a].eval(x);
      for (int a = 0; a < k; ++a) {
        double r = -dxx[a].eval(x) - dyy[a].eval(x);
        for (int b = 0; b < k; ++b) r += A[a * k + b].eval(x) * wv[b];
        out.interior_residual = std::max(out.interior_residual, std::abs(r));
      }
    }
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < 64; ++i) {
    const double t = angle(rng), s = angle(rng);
    Point x{std::cos(t), std::sin(t)};
    Point n{std::cos(s), std::sin(s)};
    for (int a = 0; a < k; ++a) wv[a] = w[a].eval(x);
    for (int a = 0; a < k; ++a) {
      double expected = dx[a].eval(x) * n.x + dy[a].eval(x) * n.y;
      for (int b = 0; b < k; ++b) expected += Sigma[a * k + b].eval(x) * wv[b];
      double got = g[a].eval(EvalPoint{x, n, wv});
      out.boundary_residual = std::max(out.boundary_residual, std::abs(got - expected));
    }
  }
  out.pass = out.interior_residual <= 1e-12 && out.boundary_residual <= 1e-12;
  return out;
}

AssembledCase assemble_case(const OracleCase& c, int refine) {
  Mesh m = make_unit_disk(c.sectors, c.rings);
  for (int i = 0; i < refine; ++i) m = refine_uniform(m);
  auto A = MatrixField::from_strings("A", Support::Interior, c.A);
  auto Sigma = MatrixField::from_strings("Sigma", Support::Boundary, c.Sigma);
  auto M = MatrixField::from_strings("M", Support::Interior, c.M);
  auto P = MatrixField::from_strings("P", Support::Boundary, c.P);
  GramPair gram = assemble_gram(m, A, Sigma, M, P);
  return AssembledCase{std::move(m), std::move(gram), BoundaryNonlinearity::parse(c.g)};
}

double relative_trace_error(const Mesh& m, const Eigen::VectorXd& U, const std::vector<std::string>& exact) {
  const int k = static_cast<int>(exact.size());
  if (k < 1 || U.size() != static_cast<Eigen::Index>(m.num_vertices()) * k) {
    throw InvalidParameter("relative_trace_error: U does not match the mesh and exact data");
  }
  std::vector<Expr> w;
  for (const auto& s : exact) w.push_back(parse_coefficient(s));
  double err = 0.0, ref = 0.0;
  for (const auto& q : boundary_quadrature(m)) {
    const auto& be = m.boundary_edges()[q.edge];
    for (int a = 0; a < k; ++a) {
      const double uh = q.shape[0] * U(be.v[0] * k + a) + q.shape[1] * U(be.v[1] * k + a);
      const double wx = w[a].eval(q.x);
      err += q.weight * (uh - wx) * (uh - wx);
      ref += q.weight * wx * wx;
    }
  }
  if (!(ref > 0.0)) throw InvalidParameter("relative_trace_error: exact trace vanishes");
  return std::sqrt(err / ref);
}

}  // namespace srlab::oracle

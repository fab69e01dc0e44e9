#include "srlab/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "srlab/assembly.hpp"
#include "srlab/certify.hpp"
#include "srlab/config.hpp"
#include "srlab/error.hpp"
#include "srlab/oracle.hpp"
#include "srlab/output.hpp"
#include "srlab/solve.hpp"
#include "srlab/spectrum.hpp"
#include "srlab/weights.hpp"

namespace srlab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

json point_json(Point p) { return json::array({p.x, p.y}); }

struct Hypotheses {
  json report;
  bool psd_ok = true;
  bool all_pass = true;
};

Hypotheses check_hypotheses(const RunConfig& cfg, const Mesh& mesh) {
  Hypotheses h;
  const auto ipts = sample_points(cfg.A, mesh);
  const auto bpts = sample_points(cfg.Sigma, mesh);
  auto nonneg_json = [](const NonnegativeReport& r) {
    json v = json::array();
    for (const auto& e : r.violations) {
      v.push_back({{"entry", json::array({e.row + 1, e.col + 1})}, {"at", point_json(e.at)}, {"value", e.value}});
      if (v.size() >= 10) break;
    }
    return json{{"pass", r.pass},
                {"strictly_positive_somewhere", r.strictly_positive_somewhere},
                {"violations", v},
                {"violation_count", r.violations.size()},
                {"notes", r.notes},
                {"samples", r.samples}};
  };
  auto psd_json = [](const PsdReport& r) {
    return json{{"pass", r.pass},
                {"worst_eigenvalue", r.worst_eigenvalue},
                {"worst_point", point_json(r.worst_point)},
                {"positive_definite_somewhere", r.positive_definite_somewhere},
                {"positive_definite_everywhere", r.positive_definite_everywhere},
                {"samples", r.samples}};
  };
  const auto a_nn = validate_nonnegative(cfg.A, ipts, true);
  const auto a_psd = validate_psd(cfg.A, ipts);
  const auto s_nn = validate_nonnegative(cfg.Sigma, bpts, false);
  const auto s_psd = validate_psd(cfg.Sigma, bpts);
  const auto m_nn = validate_nonnegative(cfg.M, ipts, true);
  const auto m_psd = validate_psd(cfg.M, ipts);
  const auto p_nn = validate_nonnegative(cfg.P, bpts, false);
  const auto p_psd = validate_psd(cfg.P, bpts);
  const auto mp = validate_mp_integral(cfg.M, cfg.P, mesh);
  const auto asmp = validate_asmp(cfg.A, cfg.Sigma, cfg.M, cfg.P, mesh);

  auto verdict = [&](const char* name, bool pass, json detail) {
    h.all_pass = h.all_pass && pass;
    h.report[name] = {{"pass", pass}, {"detail", std::move(detail)}};
  };
  verdict("A1", a_nn.pass, nonneg_json(a_nn));
  verdict("A2", a_psd.pass && a_psd.positive_definite_somewhere, psd_json(a_psd));
  verdict("S1", s_nn.pass, nonneg_json(s_nn));
  verdict("S2", s_psd.pass && s_psd.positive_definite_somewhere, psd_json(s_psd));
  verdict("M1", m_nn.pass && m_psd.pass, {{"nonnegative", nonneg_json(m_nn)}, {"psd", psd_json(m_psd)}});
  verdict("P1", p_psd.pass && p_psd.positive_definite_somewhere,
          {{"nonnegative", nonneg_json(p_nn)}, {"psd", psd_json(p_psd)}});
  json failing = json::array();
  for (auto [i, j] : mp.failing) failing.push_back(json::array({i + 1, j + 1}));
  verdict("MP", mp.pass, {{"integrals", to_json(mp.integrals)}, {"failing", failing}});
  verdict("ASMP", asmp.pass,
          {{"stiffness_clause", asmp.stiffness_clause},
           {"mass_clause", asmp.mass_clause},
           {"A_definite_somewhere", asmp.a_definite},
           {"Sigma_definite_somewhere", asmp.sigma_definite},
           {"M_definite_somewhere", asmp.m_definite},
           {"P_definite_somewhere", asmp.p_definite}});
  h.report["sampled"] = "verdicts are evaluated at assembly quadrature points only";
  h.psd_ok = a_psd.pass && s_psd.pass && m_psd.pass && p_psd.pass;
  return h;
}

void require_psd(const Hypotheses& h) {
  if (!h.psd_ok) throw ValidationError("a weight field is not positive semidefinite; see hypotheses report");
}

void require_boundary_pencil(const RunConfig& cfg, const char* what) {
  if (!cfg.M.is_zero()) {
    throw ValidationError(std::string(what) + " works with the boundary pencil (S, B_P) and needs weights.M = 0");
  }
}

json spectrum_json(const Spectrum& sp, const Mesh& m) {
  json j{{"k", sp.k},
         {"N", sp.eigenvectors.rows()},
         {"mu", to_json(sp.eigenvalues)},
         {"kernel_dim", sp.kernel_dim},
         {"finite_count", sp.finite_count},
         {"shift_used", sp.shift_used},
         {"kernel_threshold", sp.kernel_threshold},
         {"residuals", {{"orthonormality", sp.orthonormality_error}, {"diagonality", sp.diagonality_error}}}};
  if (sp.count() >= 1) {
    auto v = sign_check_first(sp, m);
    const char* status = v.status == SignVerdict::Status::OneSigned        ? "one-signed"
                         : v.status == SignVerdict::Status::SignChange     ? "sign-change"
                                                                           : "inconclusive: multiple";
    j["sign_check_first"] = {{"status", status}, {"min", v.min_value}, {"max", v.max_value}};
  }
  return j;
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p);
  if (!f) throw ValidationError("cannot write " + p.string());
  f << s;
}

void write_json_file(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

template <class F>
void write_with(const fs::path& p, F&& fn) {
  std::ofstream f(p);
  if (!f) throw ValidationError("cannot write " + p.string());
  fn(f);
}

struct Session {
  RunConfig cfg;
  Mesh mesh;
  fs::path out_dir;
};

Session open_session(const Invocation& inv) {
  if (!inv.config) throw ConfigError("<file>", "a config file is required for '" + inv.subcommand + "'");
  RunConfig cfg = load_config(*inv.config);
  Mesh mesh = build_mesh(cfg.domain);
  fs::path out = inv.out_dir ? *inv.out_dir : cfg.output.directory;
  fs::create_directories(out);
  return Session{std::move(cfg), std::move(mesh), std::move(out)};
}

int cmd_mesh(const Session& s, std::ostream& out) {
  const Mesh& m = s.mesh;
  json j{{"vertices", m.num_vertices()},
         {"triangles", m.num_triangles()},
         {"boundary_edges", m.num_boundary_edges()},
         {"edges", m.num_edges()},
         {"area", m.total_area()},
         {"boundary_length", m.boundary_length()},
         {"boundary_nodes", boundary_nodes(m).size()}};
  write_with(s.out_dir / "mesh.txt", [&](std::ostream& f) { write_mesh(f, m); });
  if (s.cfg.output.wants("json")) write_json_file(s.out_dir / "mesh.json", j);
  if (s.cfg.output.wants("svg")) {
    std::vector<double> r;
    for (const auto& p : m.vertices()) r.push_back(std::hypot(p.x, p.y));
    write_with(s.out_dir / "mesh.svg",
               [&](std::ostream& f) { write_field_svg(f, m, r, {640, 0, "mesh (colored by |x|)"}); });
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

void plot_modes(const Session& s, const Spectrum& sp, const std::string& stem) {
  const int k = sp.k;
  const int plots = std::min(s.cfg.output.plots, sp.count());
  for (int i = 0; i < plots; ++i) {
    for (int a = 0; a < k; ++a) {
      std::vector<double> nodal(static_cast<std::size_t>(s.mesh.num_vertices()));
      for (int v = 0; v < s.mesh.num_vertices(); ++v) nodal[v] = sp.eigenvectors(v * k + a, i);
      std::string name = stem + "_" + std::to_string(i + 1) + (k > 1 ? "_u" + std::to_string(a + 1) : "") + ".svg";
      std::ostringstream title;
      title << "phi_" << i + 1 << (k > 1 ? " component " + std::to_string(a + 1) : "") << ", mu = "
            << sp.eigenvalues(i);
      write_with(s.out_dir / name, [&](std::ostream& f) { write_field_svg(f, s.mesh, nodal, {640, 12, title.str()}); });
    }
  }
}

int cmd_spectrum(const Session& s, std::ostream& out) {
  auto hyp = check_hypotheses(s.cfg, s.mesh);
  require_psd(hyp);
  const auto t0 = std::chrono::steady_clock::now();
  GramPair g = assemble_gram(s.mesh, s.cfg.A, s.cfg.Sigma, s.cfg.M, s.cfg.P);
  EigenOptions eo = s.cfg.eigen;
  eo.clamp_count = true;
  Spectrum sp = solve_eigs(g, eo);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json j = spectrum_json(sp, s.mesh);
  j["seconds"] = secs;
  j["hypotheses"] = hyp.report;
  if (s.cfg.output.wants("json")) write_json_file(s.out_dir / "spectrum.json", j);
  if (s.cfg.output.wants("coo")) {
    write_with(s.out_dir / "S.coo", [&](std::ostream& f) { write_coo(f, g.S); });
    write_with(s.out_dir / "B.coo", [&](std::ostream& f) { write_coo(f, g.B); });
    write_with(s.out_dir / "B_P.coo", [&](std::ostream& f) { write_coo(f, g.B_P); });
  }
  if (s.cfg.output.wants("svg")) plot_modes(s, sp, "eigen");
  out << j.dump(2) << '\n';
  return kExitOk;
}

SlopeBounds resolve_bounds(const CertifySpec& c, const RunConfig& cfg, const Mesh& m) {
  if (c.a) return build_alpha_beta(*c.a, *c.b, cfg.P, m);
  SlopeBounds b;
  try {
    b.alpha = sample_on_boundary(parse(c.alpha->source, cfg.k), m);
  } catch (const Error& e) {
    throw ConfigError("certify.alpha", e.what());
  }
  try {
    b.beta = sample_on_boundary(parse(c.beta->source, cfg.k), m);
  } catch (const Error& e) {
    throw ConfigError("certify.beta", e.what());
  }
  return b;
}

int cmd_certify(const Session& s, std::ostream& out) {
  if (!s.cfg.certify) throw ConfigError("certify", "missing section");
  const auto& c = *s.cfg.certify;
  require_boundary_pencil(s.cfg, "certify");
  auto hyp = check_hypotheses(s.cfg, s.mesh);
  require_psd(hyp);
  GramPair g = assemble_gram(s.mesh, s.cfg.A, s.cfg.Sigma, s.cfg.M, s.cfg.P);
  EigenOptions eo = s.cfg.eigen;
  eo.count = std::max(eo.count, c.j + 4);
  eo.clamp_count = true;
  Spectrum sp = solve_eigs(g, eo);
  SlopeBounds bounds = resolve_bounds(c, s.cfg, s.mesh);
  auto cert = certify(sp, g, s.mesh, bounds.alpha, bounds.beta, c.j);
  auto idx1 = [](const std::vector<int>& v) {
    std::vector<int> o;
    for (int i : v) o.push_back(i + 1);
    return o;
  };
  json j{{"verdict", cert.pass ? "PASS" : "FAIL"},
         {"j", cert.j},
         {"mu_j", cert.mu_j},
         {"mu_j1", cert.mu_j1},
         {"E_j", {{"modes", idx1(cert.cluster_j)}, {"width", cert.cluster_width_j}}},
         {"E_j1", {{"modes", idx1(cert.cluster_j1)}, {"width", cert.cluster_width_j1}}},
         {"margins", {{"alpha_minus_mu_j", cert.margin_alpha},
                      {"beta_minus_alpha", cert.margin_order},
                      {"mu_j1_minus_beta", cert.margin_beta}}},
         {"gram_j", to_json(cert.gram_j)},
         {"gram_j1", to_json(cert.gram_j1)},
         {"gram_min_j", cert.gram_min_j},
         {"gram_min_j1", cert.gram_min_j1},
         {"reasons", cert.reasons},
         {"alpha_beta", c.a ? json{{"a", *c.a}, {"b", *c.b}}
                             : json{{"alpha", c.alpha->source}, {"beta", c.beta->source}}},
         {"mu", to_json(sp.eigenvalues)},
         {"hypotheses", hyp.report}};
  if (!c.scan_radii.empty()) {
    if (!s.cfg.solve) throw ConfigError("certify.slope_scan", "needs solve.g for the nonlinearity");
    auto gnl = BoundaryNonlinearity::parse(s.cfg.solve->g);
    auto env = slope_scan(gnl, s.mesh, c.scan_radii, c.scan_directions);
    j["slope_scan"] = {{"certifying", env.certifying},
                       {"note", "finite radii do not witness liminf or limsup; diagnostic only"},
                       {"radii", env.radii},
                       {"min", env.min_by_radius},
                       {"max", env.max_by_radius}};
  }
  if (s.cfg.output.wants("json")) write_json_file(s.out_dir / "certificate.json", j);
  out << j.dump(2) << '\n';
  return cert.pass ? kExitOk : kExitValidation;
}

int cmd_solve(const Session& s, std::ostream& out, std::ostream& err) {
  if (!s.cfg.solve) throw ConfigError("solve", "missing section");
  const auto& sv = *s.cfg.solve;
  require_boundary_pencil(s.cfg, "solve");
  auto hyp = check_hypotheses(s.cfg, s.mesh);
  require_psd(hyp);
  BoundaryNonlinearity gnl = [&] {
    try {
      return BoundaryNonlinearity::parse(sv.g);
    } catch (const Error& e) {
      throw ConfigError("solve.g", e.what());
    }
  }();
  if (!gnl.differentiable() && !sv.homotopy.allow_fd) {
    throw ConfigError("solve.allow_fd", "g is not differentiable (" + gnl.nondifferentiable_reason() + ")");
  }
  GramPair g = assemble_gram(s.mesh, s.cfg.A, s.cfg.Sigma, s.cfg.M, s.cfg.P);
  json j;
  double delta = 0.0;
  if (sv.j) {
    EigenOptions eo = s.cfg.eigen;
    eo.count = std::max(eo.count, *sv.j + 2);
    eo.clamp_count = true;
    Spectrum sp = solve_eigs(g, eo);
    delta = pick_delta(sp, *sv.j);
    j["mu"] = to_json(sp.eigenvalues);
    j["j"] = *sv.j;
  } else {
    delta = *sv.delta;
  }
  auto trace = homotopy_solve(g, gnl, s.mesh, delta, sv.homotopy);
  json steps = json::array();
  for (const auto& st : trace.steps) {
    steps.push_back(
        {{"lambda", st.lambda}, {"iterations", st.iterations}, {"residual", st.residual}, {"energy", st.energy}});
  }
  const auto rep = residual_report(g, gnl, s.mesh, trace.U, trace.steps.empty() ? 0.0 : trace.steps.back().lambda,
                                   delta);
  j["status"] = to_string(trace.status);
  j["delta"] = delta;
  j["cap"] = trace.cap;
  j["newton_tol"] = trace.tol;
  j["steps"] = steps;
  j["final"] = {{"residual", rep.residual}, {"energy", rep.energy}, {"mass", rep.mass}, {"trace", rep.trace}};
  if (trace.status != HomotopyStatus::Converged) {
    j["failure"] = {{"lambda", trace.failed_lambda},
                    {"energy", trace.failed_energy},
                    {"residual", trace.failed_residual},
                    {"message", trace.message}};
  }
  j["hypotheses"] = hyp.report;
  if (s.cfg.output.wants("json")) write_json_file(s.out_dir / "trace.json", j);
  if (s.cfg.output.wants("csv")) {
    write_with(s.out_dir / "solution.csv", [&](std::ostream& f) { write_solution_csv(f, s.mesh, trace.U, g.k); });
  }
  if (s.cfg.output.wants("svg")) {
    write_with(s.out_dir / "trace.svg",
               [&](std::ostream& f) { write_trace_svg(f, s.mesh, trace.U, g.k, {640, 0, "boundary trace"}); });
    for (int a = 0; a < g.k; ++a) {
      std::vector<double> nodal(static_cast<std::size_t>(s.mesh.num_vertices()));
      for (int v = 0; v < s.mesh.num_vertices(); ++v) nodal[v] = trace.U(v * g.k + a);
      write_with(s.out_dir / ("solution_u" + std::to_string(a + 1) + ".svg"), [&](std::ostream& f) {
        write_field_svg(f, s.mesh, nodal, {640, 12, "u" + std::to_string(a + 1)});
      });
    }
  }
  out << j.dump(2) << '\n';
  if (trace.status != HomotopyStatus::Converged) {
    err << "srlab: " << to_string(trace.status) << ": " << trace.message << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

// Oracle comparisons that do not depend on any config.
json oracle_suite(bool& all_pass) {
  json checks = json::array();
  auto record = [&](const std::string& name, bool pass, double value, double tol) {
    all_pass = all_pass && pass;
    checks.push_back({{"name", name}, {"pass", pass}, {"value", value}, {"tolerance", tol}});
  };
  auto disk_gram = [](int s, int r, const std::vector<double>& sigma) {
    const int k = static_cast<int>(sigma.size());
    Mesh m = make_unit_disk(s, r);
    auto A = MatrixField::zero("A", Support::Interior, k);
    auto M = MatrixField::zero("M", Support::Interior, k);
    std::vector<double> sig(static_cast<std::size_t>(k * k), 0.0);
    for (int a = 0; a < k; ++a) sig[a * k + a] = sigma[a];
    auto Sigma = MatrixField::constant("Sigma", Support::Boundary, k, sig);
    auto P = MatrixField::identity("P", Support::Boundary, k);
    return std::make_pair(m, assemble_gram(m, A, Sigma, M, P));
  };

  for (const auto& id : oracle::manufactured_case_ids()) {
    auto sc = oracle::self_check(oracle::manufactured_case(id));
    record("self_check:" + id, sc.pass, std::max(sc.interior_residual, sc.boundary_residual), 1e-12);
  }
  for (double sigma : {0.0, 1.0}) {
    auto [m, g] = disk_gram(64, 16, {sigma});
    EigenOptions eo;
    eo.count = 5;
    auto sp = solve_eigs(g, eo);
    auto exact = oracle::disk_steklov_exact(5, sigma);
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(sp.eigenvalues(i) - exact[i]));
    const double tol = sigma == 0.0 ? 0.02 : 0.05;
    record("disk_spectrum:sigma=" + std::to_string(static_cast<int>(sigma)), worst <= tol, worst, tol);
  }
  {
    auto [m1, g1] = disk_gram(32, 8, {1.0});
    auto [m2, g2] = disk_gram(32, 8, {2.0});
    auto [m12, g12] = disk_gram(32, 8, {1.0, 2.0});
    EigenOptions eo;
    eo.count = 8;
    auto s1 = solve_eigs(g1, eo), s2 = solve_eigs(g2, eo), s12 = solve_eigs(g12, eo);
    std::vector<double> a(s1.eigenvalues.data(), s1.eigenvalues.data() + 8);
    std::vector<double> b(s2.eigenvalues.data(), s2.eigenvalues.data() + 8);
    auto merged = oracle::decoupled_union(a, b);
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) worst = std::max(worst, std::abs(s12.eigenvalues(i) - merged[i]));
    record("decoupled_spectrum", worst <= 1e-9, worst, 1e-9);
  }
  for (const auto& id : oracle::manufactured_case_ids()) {
    auto c = oracle::manufactured_case(id);
    auto ac = oracle::assemble_case(c);
    auto tr = homotopy_solve(ac.gram, ac.g, ac.mesh, c.delta);
    double e = tr.status == HomotopyStatus::Converged ? oracle::relative_trace_error(ac.mesh, tr.U, c.exact) : 1.0;
    record("manufactured:" + id, tr.status == HomotopyStatus::Converged && e <= c.trace_tolerance, e,
           c.trace_tolerance);
  }
  {
    Mesh m = make_unit_square(2);
    auto g = assemble_gram(m, MatrixField::zero("A", Support::Interior, 1), MatrixField::zero("Sigma", Support::Boundary, 1),
                           MatrixField::zero("M", Support::Interior, 1), MatrixField::identity("P", Support::Boundary, 1));
    auto kb = hmp_kernel(g);
    record("kernel_dim:M=0,P=1", kb.dimension == 1, kb.dimension, 0.0);
  }
  return checks;
}

int cmd_validate(const Invocation& inv, std::ostream& out) {
  bool pass = true;
  json j;
  j["oracles"] = oracle_suite(pass);
  if (inv.config) {
    RunConfig cfg = load_config(*inv.config);
    Mesh mesh = build_mesh(cfg.domain);
    auto hyp = check_hypotheses(cfg, mesh);
    j["hypotheses"] = hyp.report;
    if (!hyp.psd_ok || (inv.strict && !hyp.all_pass)) pass = false;
    if (hyp.psd_ok) {
      GramPair g = assemble_gram(mesh, cfg.A, cfg.Sigma, cfg.M, cfg.P);
      EigenOptions eo = cfg.eigen;
      eo.clamp_count = true;
      Spectrum sp = solve_eigs(g, eo);
      const double scale = std::max(1.0, sp.count() ? sp.eigenvalues.maxCoeff() : 1.0);
      const bool ok = sp.orthonormality_error <= 1e-8 && sp.diagonality_error <= 1e-6 * scale &&
                      sp.kernel_dim + sp.finite_count == g.size();
      j["spectral_structure"] = {{"pass", ok},
                                 {"orthonormality", sp.orthonormality_error},
                                 {"diagonality", sp.diagonality_error},
                                 {"kernel_dim", sp.kernel_dim},
                                 {"finite_count", sp.finite_count}};
      pass = pass && ok;
    }
    fs::path dir = inv.out_dir ? *inv.out_dir : cfg.output.directory;
    fs::create_directories(dir);
    j["verdict"] = pass ? "PASS" : "FAIL";
    write_json_file(dir / "validate.json", j);
  } else {
    j["verdict"] = pass ? "PASS" : "FAIL";
    if (inv.out_dir) {
      fs::create_directories(*inv.out_dir);
      write_json_file(*inv.out_dir / "validate.json", j);
    }
  }
  out << j.dump(2) << '\n';
  return pass ? kExitOk : kExitValidation;
}

}  // namespace

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    if (inv.subcommand == "validate") return cmd_validate(inv, out);
    Session s = open_session(inv);
    if (inv.subcommand == "mesh") return cmd_mesh(s, out);
    if (inv.subcommand == "spectrum") return cmd_spectrum(s, out);
    if (inv.subcommand == "certify") return cmd_certify(s, out);
    if (inv.subcommand == "solve") return cmd_solve(s, out, err);
    err << "srlab: unknown subcommand '" << inv.subcommand << "'\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "srlab: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "srlab: " << e.what() << '\n';
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "srlab: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "srlab: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Steklov-Robin eigensystem laboratory"};
  app.require_subcommand(1);
  Invocation inv;
  std::string config, out_dir;
  auto add = [&](const char* name, const char* help, bool need_config) {
    auto* sub = app.add_subcommand(name, help);
    auto* opt = sub->add_option("config", config, "JSON run configuration");
    if (need_config) opt->required();
    sub->add_option("-o,--out", out_dir, "output directory (overrides output.directory)");
    return sub;
  };
  add("mesh", "build the mesh and write it out", true);
  add("spectrum", "assemble and solve the eigenproblem", true);
  add("certify", "certify the nonresonance conditions at a gap", true);
  add("solve", "solve the nonlinear problem by homotopy", true);
  auto* val = add("validate", "run oracle comparisons (and check a config when given)", false);
  val->add_flag("--strict", inv.strict, "fail when any sampled hypothesis fails");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  inv.subcommand = app.get_subcommands().front()->get_name();
  if (!config.empty()) inv.config = config;
  if (!out_dir.empty()) inv.out_dir = out_dir;
  return run(inv, std::cout, std::cerr);
}

}  // namespace srlab::cli

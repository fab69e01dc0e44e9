#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "srlab/assembly.hpp"
#include "srlab/certify.hpp"
#include "srlab/cli.hpp"
#include "srlab/config.hpp"
#include "srlab/error.hpp"
#include "srlab/mesh.hpp"
#include "srlab/oracle.hpp"
#include "srlab/solve.hpp"
#include "srlab/spectrum.hpp"
#include "srlab/weights.hpp"

namespace py = pybind11;
using namespace srlab;

namespace {

Eigen::MatrixXd vertex_array(const Mesh& m) {
  Eigen::MatrixXd v(m.num_vertices(), 2);
  for (int i = 0; i < m.num_vertices(); ++i) {
    v(i, 0) = m.vertices()[static_cast<std::size_t>(i)].x;
    v(i, 1) = m.vertices()[static_cast<std::size_t>(i)].y;
  }
  return v;
}

Eigen::MatrixXi triangle_array(const Mesh& m) {
  Eigen::MatrixXi t(m.num_triangles(), 3);
  for (int i = 0; i < m.num_triangles(); ++i)
    for (int c = 0; c < 3; ++c) t(i, c) = m.triangles()[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
  return t;
}

Eigen::MatrixXi edge_array(const Mesh& m) {
  Eigen::MatrixXi e(m.num_boundary_edges(), 3);
  for (int i = 0; i < m.num_boundary_edges(); ++i) {
    const auto& be = m.boundary_edges()[static_cast<std::size_t>(i)];
    e(i, 0) = be.v[0];
    e(i, 1) = be.v[1];
    e(i, 2) = be.marker;
  }
  return e;
}

// Accepts a number (promoted to a constant k x k multiple of I), or k rows of numbers/strings.
MatrixField field_from_py(const std::string& name, Support s, int k, const py::object& value) {
  if (value.is_none()) return MatrixField::zero(name, s, k);
  if (py::isinstance<py::float_>(value) || py::isinstance<py::int_>(value))
    return MatrixField::identity(name, s, k, value.cast<double>());
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : value) {
    std::vector<std::string> r;
    for (const auto& x : row) r.push_back(py::isinstance<py::str>(x) ? x.cast<std::string>() : py::str(x).cast<std::string>());
    rows.push_back(std::move(r));
  }
  return MatrixField::from_strings(name, s, rows);
}

}  // namespace

PYBIND11_MODULE(_srlab, mod) {
  mod.doc() = "Steklov-Robin eigensystems and boundary-nonlinear solves on P1 triangulations";

  auto err = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  auto inv = py::register_exception<InvalidParameter>(mod, "InvalidParameter", err.ptr());
  py::register_exception<ParseError>(mod, "ParseError", err.ptr());
  py::register_exception<EvalError>(mod, "EvalError", err.ptr());
  py::register_exception<NonDifferentiable>(mod, "NonDifferentiable", err.ptr());
  auto val = py::register_exception<ValidationError>(mod, "ValidationError", err.ptr());
  (void)inv;
  (void)val;
  auto num = py::register_exception<NumericalError>(mod, "NumericalError", err.ptr());
  py::register_exception<ResonanceError>(mod, "ResonanceError", num.ptr());

  py::class_<Mesh>(mod, "Mesh")
      .def_static("unit_square", &make_unit_square, py::arg("n"))
      .def_static("unit_disk", &make_unit_disk, py::arg("sectors"), py::arg("rings"))
      .def_static("read", &read_mesh_file, py::arg("path"))
      .def("refine", &refine_uniform)
      .def_property_readonly("vertices", &vertex_array)
      .def_property_readonly("triangles", &triangle_array)
      .def_property_readonly("boundary_edges", &edge_array)
      .def_property_readonly("num_vertices", &Mesh::num_vertices)
      .def_property_readonly("num_triangles", &Mesh::num_triangles)
      .def_property_readonly("num_boundary_edges", &Mesh::num_boundary_edges)
      .def("total_area", &Mesh::total_area)
      .def("boundary_length", &Mesh::boundary_length)
      .def("boundary_nodes", [](const Mesh& m) { return boundary_nodes(m); })
      .def("to_text", [](const Mesh& m) {
        std::ostringstream os;
        write_mesh(os, m);
        return os.str();
      });

  py::class_<GramPair>(mod, "GramPair")
      .def_readonly("S", &GramPair::S)
      .def_readonly("B", &GramPair::B)
      .def_readonly("B_P", &GramPair::B_P)
      .def_readonly("k", &GramPair::k)
      .def_readonly("boundary_dofs", &GramPair::boundary_dofs)
      .def_property_readonly("size", &GramPair::size);

  mod.def(
      "assemble",
      [](const Mesh& m, int k, const py::object& A, const py::object& Sigma, const py::object& M, const py::object& P) {
        return assemble_gram(m, field_from_py("A", Support::Interior, k, A), field_from_py("Sigma", Support::Boundary, k, Sigma),
                             field_from_py("M", Support::Interior, k, M), field_from_py("P", Support::Boundary, k, P));
      },
      py::arg("mesh"), py::arg("k") = 1, py::arg("A") = py::none(), py::arg("Sigma") = py::none(),
      py::arg("M") = py::none(), py::arg("P") = py::none(),
      "Gram matrices S, B, B_P. Weights are None (zero), a number c (c I) or k rows of expression strings.");

  py::class_<Spectrum>(mod, "Spectrum")
      .def_readonly("eigenvalues", &Spectrum::eigenvalues)
      .def_readonly("eigenvectors", &Spectrum::eigenvectors)
      .def_readonly("kernel_dim", &Spectrum::kernel_dim)
      .def_readonly("finite_count", &Spectrum::finite_count)
      .def_readonly("shift_used", &Spectrum::shift_used)
      .def_readonly("orthonormality_error", &Spectrum::orthonormality_error)
      .def_readonly("diagonality_error", &Spectrum::diagonality_error);

  mod.def(
      "eigs",
      [](const GramPair& g, int count, std::optional<double> shift, bool clamp) {
        EigenOptions o;
        o.count = count;
        o.shift = shift;
        o.clamp_count = clamp;
        return solve_eigs(g, o);
      },
      py::arg("gram"), py::arg("count") = 10, py::arg("shift") = py::none(), py::arg("clamp_count") = false);

  mod.def("boundary_pencil", &boundary_pencil, py::arg("gram"));

  py::class_<NonresonanceCertificate>(mod, "Certificate")
      .def_readonly("passed", &NonresonanceCertificate::pass)
      .def_readonly("j", &NonresonanceCertificate::j)
      .def_readonly("mu_j", &NonresonanceCertificate::mu_j)
      .def_readonly("mu_j1", &NonresonanceCertificate::mu_j1)
      .def_readonly("margin_alpha", &NonresonanceCertificate::margin_alpha)
      .def_readonly("margin_order", &NonresonanceCertificate::margin_order)
      .def_readonly("margin_beta", &NonresonanceCertificate::margin_beta)
      .def_readonly("gram_min_j", &NonresonanceCertificate::gram_min_j)
      .def_readonly("gram_min_j1", &NonresonanceCertificate::gram_min_j1)
      .def_readonly("reasons", &NonresonanceCertificate::reasons);

  mod.def(
      "certify",
      [](const Spectrum& sp, const GramPair& g, const Mesh& m, const std::string& alpha, const std::string& beta, int j) {
        auto a = sample_on_boundary(parse(alpha, g.k), m);
        auto b = sample_on_boundary(parse(beta, g.k), m);
        return certify(sp, g, m, a, b, j);
      },
      py::arg("spectrum"), py::arg("gram"), py::arg("mesh"), py::arg("alpha"), py::arg("beta"), py::arg("j"),
      "alpha and beta are expressions in x1, x2, n1, n2 sampled at the boundary quadrature points.");

  mod.def("pick_delta", &pick_delta, py::arg("spectrum"), py::arg("j"));

  py::class_<HomotopyTrace>(mod, "HomotopyTrace")
      .def_property_readonly("status", [](const HomotopyTrace& t) { return std::string(to_string(t.status)); })
      .def_readonly("U", &HomotopyTrace::U)
      .def_readonly("delta", &HomotopyTrace::delta)
      .def_readonly("cap", &HomotopyTrace::cap)
      .def_readonly("message", &HomotopyTrace::message)
      .def_property_readonly("steps", [](const HomotopyTrace& t) {
        py::list out;
        for (const auto& s : t.steps) {
          py::dict d;
          d["lambda"] = s.lambda;
          d["iterations"] = s.iterations;
          d["residual"] = s.residual;
          d["energy"] = s.energy;
          out.append(d);
        }
        return out;
      });

  mod.def(
      "homotopy_solve",
      [](const GramPair& g, const std::vector<std::string>& gsrc, const Mesh& m, double delta, int steps, double tol,
         int maxit, std::optional<double> cap) {
        HomotopyOptions o;
        o.steps = steps;
        o.newton.tol = tol;
        o.newton.maxit = maxit;
        o.cap = cap;
        return homotopy_solve(g, BoundaryNonlinearity::parse(gsrc), m, delta, o);
      },
      py::arg("gram"), py::arg("g"), py::arg("mesh"), py::arg("delta"), py::arg("steps") = 10, py::arg("tol") = 1e-10,
      py::arg("maxit") = 50, py::arg("cap") = py::none());

  mod.def(
      "picard_solve",
      [](const GramPair& g, const std::vector<std::string>& gsrc, const Mesh& m, double delta, double omega) {
        PicardOptions o;
        o.omega = omega;
        auto r = picard_solve(g, BoundaryNonlinearity::parse(gsrc), m, delta, o);
        return py::make_tuple(r.U, r.converged, r.iterations);
      },
      py::arg("gram"), py::arg("g"), py::arg("mesh"), py::arg("delta"), py::arg("omega") = 1.0);

  mod.def("energy_norm", &energy_norm, py::arg("gram"), py::arg("U"));
  mod.def("disk_steklov_exact", &oracle::disk_steklov_exact, py::arg("n_modes"), py::arg("sigma") = 0.0);

  mod.def(
      "run",
      [](const std::string& subcommand, std::optional<std::string> config, std::optional<std::string> out_dir, bool strict) {
        cli::Invocation inv{subcommand, {}, {}, strict};
        if (config) inv.config = *config;
        if (out_dir) inv.out_dir = *out_dir;
        std::ostringstream out, errs;
        const int code = cli::run(inv, out, errs);
        return py::make_tuple(code, out.str(), errs.str());
      },
      py::arg("subcommand"), py::arg("config") = py::none(), py::arg("out_dir") = py::none(), py::arg("strict") = false,
      "Runs a CLI subcommand in-process; returns (exit_code, stdout, stderr).");
}

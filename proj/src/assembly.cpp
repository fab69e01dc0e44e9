#include "srlab/assembly.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "srlab/error.hpp"
#include "srlab/quadrature.hpp"

namespace srlab {

namespace {

struct Entry {
  int row;
  int col;
  double value;
};

// Sorts by (row, col) keeping insertion order among equal keys, sums in that
// order, and builds the matrix from unique entries. Results are bitwise
// independent of how the element loop is scheduled as long as entries are
// emitted in element order.
SparseMatrix compress(std::vector<Entry>& entries, int n) {
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Eigen::Triplet<double>> unique;
  unique.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size();) {
    double sum = 0.0;
    std::size_t j = i;
    for (; j < entries.size() && entries[j].row == entries[i].row && entries[j].col == entries[i].col; ++j) {
      sum += entries[j].value;
    }
    unique.emplace_back(entries[i].row, entries[i].col, sum);
    i = j;
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(unique.begin(), unique.end());
  a.makeCompressed();
  return a;
}

// Adds w * phi_i * phi_j * W(a, b) for every node pair and component pair,
// emitting mirrored entries with identical values.
template <std::size_t NV>
void add_weighted_block(std::vector<Entry>& out, const std::array<int, NV>& nodes, const std::array<double, NV>& phi,
                        double w, const Eigen::MatrixXd& W, int k) {
  for (std::size_t i = 0; i < NV; ++i) {
    for (std::size_t j = 0; j < NV; ++j) {
      double base = w * phi[i] * phi[j];
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
          double wab = a <= b ? W(a, b) : W(b, a);
          bool upper = i < j || (i == j && a <= b);
          double val = upper ? base * wab : w * phi[j] * phi[i] * wab;
          if (val != 0.0) out.push_back({nodes[i] * k + a, nodes[j] * k + b, val});
        }
      }
    }
  }
}

void check_field(const MatrixField& f, Support expected, int k) {
  if (f.support() != expected) {
    throw ValidationError("field " + f.name() + " has the wrong support (" +
                          (expected == Support::Interior ? "expected interior" : "expected boundary") + ")");
  }
  if (f.k() != k) throw ValidationError("field " + f.name() + " has k=" + std::to_string(f.k()));
}

void check_symmetric(const MatrixField& f, const Eigen::MatrixXd& v, Point at) {
  if (v.size() && (v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    std::ostringstream os;
    os << "field " << f.name() << " is not symmetric at (" << at.x << ", " << at.y << ")";
    throw ValidationError(os.str());
  }
}

std::vector<double> boundary_trace_at(const Mesh& m, const BoundaryQuadPoint& q, const Eigen::VectorXd& U, int k) {
  const auto& be = m.boundary_edges()[q.edge];
  std::vector<double> u(k);
  for (int a = 0; a < k; ++a) u[a] = q.shape[0] * U(be.v[0] * k + a) + q.shape[1] * U(be.v[1] * k + a);
  return u;
}

}  // namespace

GramPair assemble_gram(const Mesh& m, const MatrixField& A, const MatrixField& Sigma, const MatrixField& M,
                       const MatrixField& P) {
  const int k = A.k();
  check_field(A, Support::Interior, k);
  check_field(Sigma, Support::Boundary, k);
  check_field(M, Support::Interior, k);
  check_field(P, Support::Boundary, k);
  const int n = m.num_vertices() * k;

  std::vector<Entry> s_entries, b_entries, bp_entries;
  s_entries.reserve(static_cast<std::size_t>(m.num_triangles()) * 9 * k * k * 2);

  const bool a_zero = A.is_zero();
  const bool m_zero = M.is_zero();
  const bool sigma_zero = Sigma.is_zero();
  const bool p_zero = P.is_zero();

  auto quad = interior_quadrature(m);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles()[t];
    const Point& p0 = m.vertices()[tri[0]];
    const Point& p1 = m.vertices()[tri[1]];
    const Point& p2 = m.vertices()[tri[2]];
    const double area = m.triangle_area(t);
    // Gradients of barycentric coordinates: grad l_i = (y_j - y_k, x_k - x_j) / (2 area).
    const std::array<Point, 3> grad{{{(p1.y - p2.y) / (2 * area), (p2.x - p1.x) / (2 * area)},
                                     {(p2.y - p0.y) / (2 * area), (p0.x - p2.x) / (2 * area)},
                                     {(p0.y - p1.y) / (2 * area), (p1.x - p0.x) / (2 * area)}}};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        int lo = std::min(i, j), hi = std::max(i, j);
        double val = area * (grad[lo].x * grad[hi].x + grad[lo].y * grad[hi].y);
        for (int a = 0; a < k; ++a) s_entries.push_back({tri[i] * k + a, tri[j] * k + a, val});
      }
    }
    for (int qi = 0; qi < 3; ++qi) {
      const auto& q = quad[static_cast<std::size_t>(3 * t + qi)];
      if (!a_zero) {
        Eigen::MatrixXd av = A.value(q.x);
        check_symmetric(A, av, q.x);
        add_weighted_block<3>(s_entries, tri, q.shape, q.weight, av, k);
      }
      if (!m_zero) {
        Eigen::MatrixXd mv = M.value(q.x);
        check_symmetric(M, mv, q.x);
        add_weighted_block<3>(b_entries, tri, q.shape, q.weight, mv, k);
      }
    }
  }

  for (const auto& q : boundary_quadrature(m)) {
    const auto& be = m.boundary_edges()[q.edge];
    if (!sigma_zero) {
      Eigen::MatrixXd sv = Sigma.value(q.x);
      check_symmetric(Sigma, sv, q.x);
      add_weighted_block<2>(s_entries, be.v, q.shape, q.weight, sv, k);
    }
    if (!p_zero) {
      Eigen::MatrixXd pv = P.value(q.x);
      check_symmetric(P, pv, q.x);
      add_weighted_block<2>(b_entries, be.v, q.shape, q.weight, pv, k);
      add_weighted_block<2>(bp_entries, be.v, q.shape, q.weight, pv, k);
    }
  }

  GramPair g;
  g.k = k;
  g.num_nodes = m.num_vertices();
  g.S = compress(s_entries, n);
  g.B = compress(b_entries, n);
  g.B_P = compress(bp_entries, n);
  for (int v : boundary_nodes(m)) {
    for (int a = 0; a < k; ++a) g.boundary_dofs.push_back(v * k + a);
  }
  return g;
}

GramPair boundary_pencil(const GramPair& g) {
  GramPair out = g;
  out.B = g.B_P;
  return out;
}

Eigen::VectorXd assemble_boundary_load(const Mesh& m, const BoundaryNonlinearity& g, const Eigen::VectorXd& U) {
  const int k = g.k();
  if (U.size() != static_cast<Eigen::Index>(m.num_vertices()) * k) {
    throw InvalidParameter("assemble_boundary_load: U has wrong length");
  }
  Eigen::VectorXd load = Eigen::VectorXd::Zero(U.size());
  std::vector<double> gv(k);
  for (const auto& q : boundary_quadrature(m)) {
    const auto& be = m.boundary_edges()[q.edge];
    auto u = boundary_trace_at(m, q, U, k);
    try {
      g.evaluate(EvalPoint{q.x, q.normal, u}, gv);
    } catch (const EvalError& err) {
      std::ostringstream os;
      os << "boundary edge " << q.edge << " at (" << q.x.x << ", " << q.x.y << "): " << err.what();
      throw EvalError(os.str());
    }
    for (int i = 0; i < 2; ++i) {
      for (int a = 0; a < k; ++a) load(be.v[i] * k + a) += q.weight * gv[a] * q.shape[i];
    }
  }
  return load;
}

SparseMatrix assemble_boundary_jacobian(const Mesh& m, const BoundaryNonlinearity& g, const Eigen::VectorXd& U,
                                        bool allow_fd) {
  const int k = g.k();
  if (U.size() != static_cast<Eigen::Index>(m.num_vertices()) * k) {
    throw InvalidParameter("assemble_boundary_jacobian: U has wrong length");
  }
  if (!g.differentiable() && !allow_fd) throw NonDifferentiable(g.nondifferentiable_reason());
  std::vector<Entry> entries;
  Eigen::MatrixXd jac(k, k);
  for (const auto& q : boundary_quadrature(m)) {
    const auto& be = m.boundary_edges()[q.edge];
    auto u = boundary_trace_at(m, q, U, k);
    try {
      g.jacobian(EvalPoint{q.x, q.normal, u}, jac, allow_fd);
    } catch (const EvalError& err) {
      std::ostringstream os;
      os << "boundary edge " << q.edge << " at (" << q.x.x << ", " << q.x.y << "): " << err.what();
      throw EvalError(os.str());
    }
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        double base = q.weight * q.shape[i] * q.shape[j];
        for (int a = 0; a < k; ++a) {
          for (int b = 0; b < k; ++b) {
            double val = base * jac(a, b);
            if (val != 0.0) entries.push_back({be.v[i] * k + a, be.v[j] * k + b, val});
          }
        }
      }
    }
  }
  return compress(entries, static_cast<int>(U.size()));
}

SparseMatrix assemble_boundary_mass(const Mesh& m, int k) {
  std::vector<Entry> entries;
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(k, k);
  for (const auto& q : boundary_quadrature(m)) {
    add_weighted_block<2>(entries, m.boundary_edges()[q.edge].v, q.shape, q.weight, id, k);
  }
  return compress(entries, m.num_vertices() * k);
}

void write_coo(std::ostream& out, const SparseMatrix& a) {
  out << a.rows() << ' ' << a.nonZeros() << '\n' << std::setprecision(17);
  // Row-major listing for readability.
  Eigen::SparseMatrix<double, Eigen::RowMajor, int> r = a;
  for (int i = 0; i < r.outerSize(); ++i) {
    for (decltype(r)::InnerIterator it(r, i); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  }
}

SparseMatrix read_coo(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next = [&]() {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next()) throw FormatError("missing header 'N nnz'", 1);
  long n = 0, nnz = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> n >> nnz) || n < 0 || nnz < 0) throw FormatError("expected header 'N nnz'", lineno);
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(nnz));
  for (long e = 0; e < nnz; ++e) {
    if (!next()) throw FormatError("unexpected end of file", lineno + 1);
    std::istringstream ss(line);
    long r = 0, c = 0;
    double v = 0.0;
    if (!(ss >> r >> c >> v)) throw FormatError("expected 'row col value'", lineno);
    if (r < 0 || r >= n || c < 0 || c >= n) throw FormatError("index out of range", lineno);
    trips.emplace_back(static_cast<int>(r), static_cast<int>(c), v);
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return a;
}

}  // namespace srlab

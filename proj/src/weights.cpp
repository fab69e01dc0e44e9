#include "srlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "srlab/error.hpp"
#include "srlab/quadrature.hpp"

namespace srlab {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kNegativeTol = 1e-12;
constexpr double kPsdTol = 1e-10;
constexpr double kDefiniteTol = 1e-10;

std::string point_str(Point p) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

}  // namespace

MatrixField::MatrixField(std::string name, Support support, int k, std::vector<Expr> entries)
    : name_(std::move(name)), support_(support), k_(k), entries_(std::move(entries)) {
  if (k_ < 1) throw InvalidParameter("matrix field " + name_ + ": k must be >= 1");
  if (entries_.size() != static_cast<std::size_t>(k_) * k_) {
    throw InvalidParameter("matrix field " + name_ + ": expected " + std::to_string(k_ * k_) + " entries, got " +
                           std::to_string(entries_.size()));
  }
  for (const auto& e : entries_) {
    if (e.depends_on_u() || e.depends_on_normal()) {
      throw InvalidParameter("matrix field " + name_ + ": entries may depend on x1, x2 only");
    }
  }
}

MatrixField MatrixField::zero(std::string name, Support support, int k) {
  return MatrixField(std::move(name), support, k, std::vector<Expr>(static_cast<std::size_t>(k) * k));
}

MatrixField MatrixField::constant(std::string name, Support support, int k, std::span<const double> row_major) {
  if (row_major.size() != static_cast<std::size_t>(k) * k) {
    throw InvalidParameter("matrix field " + name + ": constant needs " + std::to_string(k * k) + " values, got " +
                           std::to_string(row_major.size()));
  }
  std::vector<Expr> entries;
  entries.reserve(row_major.size());
  for (double v : row_major) entries.push_back(constant_expr(v));
  return MatrixField(std::move(name), support, k, std::move(entries));
}

MatrixField MatrixField::identity(std::string name, Support support, int k, double scale) {
  std::vector<double> vals(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) vals[static_cast<std::size_t>(i * k + i)] = scale;
  return constant(std::move(name), support, k, vals);
}

MatrixField MatrixField::from_strings(std::string name, Support support,
                                      const std::vector<std::vector<std::string>>& rows) {
  const int k = static_cast<int>(rows.size());
  std::vector<Expr> entries;
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(rows[i].size()) != k) {
      throw InvalidParameter("matrix field " + name + ": row " + std::to_string(i) + " has " +
                             std::to_string(rows[i].size()) + " entries, expected " + std::to_string(k));
    }
    for (const auto& src : rows[i]) entries.push_back(parse_coefficient(src));
  }
  return MatrixField(std::move(name), support, k, std::move(entries));
}

Eigen::MatrixXd MatrixField::value(Point x) const {
  Eigen::MatrixXd v(k_, k_);
  for (int i = 0; i < k_; ++i) {
    for (int j = 0; j < k_; ++j) {
      try {
        v(i, j) = entries_[static_cast<std::size_t>(i * k_ + j)].eval(x);
      } catch (const EvalError& err) {
        throw EvalError("field " + name_ + " entry (" + std::to_string(i) + "," + std::to_string(j) + ") at " +
                        point_str(x) + ": " + err.what());
      }
    }
  }
  return v;
}

bool MatrixField::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Expr& e) { return e.is_constant() && e.eval(Point{}) == 0.0; });
}

std::vector<Point> sample_points(const MatrixField& f, const Mesh& m) {
  std::vector<Point> pts;
  if (f.support() == Support::Interior) {
    for (const auto& q : interior_quadrature(m)) pts.push_back(q.x);
  } else {
    for (const auto& q : boundary_quadrature(m)) pts.push_back(q.x);
  }
  return pts;
}

NonnegativeReport validate_nonnegative(const MatrixField& f, std::span<const Point> pts,
                                       bool require_positive_somewhere) {
  if (pts.empty()) throw InvalidParameter("validate_nonnegative: no sample points");
  NonnegativeReport r;
  r.field = f.name();
  r.samples = pts.size();
  r.positivity_required = require_positive_somewhere;
  for (const Point& p : pts) {
    Eigen::MatrixXd v = f.value(p);
    for (int i = 0; i < f.k(); ++i) {
      for (int j = 0; j < f.k(); ++j) {
        if (v(i, j) < -kNegativeTol) r.violations.push_back({i, j, p, v(i, j)});
        if (v(i, j) > kNegativeTol) r.strictly_positive_somewhere = true;
      }
    }
  }
  if (!r.strictly_positive_somewhere) r.notes.push_back("nowhere strictly positive");
  r.notes.push_back("verdict sampled at " + std::to_string(pts.size()) + " points");
  r.pass = r.violations.empty() && (!require_positive_somewhere || r.strictly_positive_somewhere);
  return r;
}

PsdReport validate_psd(const MatrixField& f, std::span<const Point> pts) {
  if (pts.empty()) throw InvalidParameter("validate_psd: no sample points");
  PsdReport r;
  r.field = f.name();
  r.samples = pts.size();
  r.worst_eigenvalue = std::numeric_limits<double>::infinity();
  r.positive_definite_everywhere = true;
  for (const Point& p : pts) {
    Eigen::MatrixXd v = f.value(p);
    double asym = (v - v.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol) {
      throw ValidationError("field " + f.name() + " is not symmetric at " + point_str(p) + " (asymmetry " +
                            std::to_string(asym) + ")");
    }
    double lo = spectral_decompose(v).D.minCoeff();
    if (lo < r.worst_eigenvalue) {
      r.worst_eigenvalue = lo;
      r.worst_point = p;
    }
    if (lo > kDefiniteTol) {
      r.positive_definite_somewhere = true;
    } else {
      r.positive_definite_everywhere = false;
    }
  }
  r.pass = r.worst_eigenvalue >= -kPsdTol;
  return r;
}

MpIntegralReport validate_mp_integral(const MatrixField& M, const MatrixField& P, const Mesh& m) {
  if (M.support() != Support::Interior || P.support() != Support::Boundary) {
    throw InvalidParameter("validate_mp_integral: M must be interior-supported and P boundary-supported");
  }
  if (M.k() != P.k()) throw InvalidParameter("validate_mp_integral: M and P have different k");
  const int k = M.k();
  MpIntegralReport r;
  r.integrals = Eigen::MatrixXd::Zero(k, k);
  for (const auto& q : interior_quadrature(m)) r.integrals += q.weight * M.value(q.x);
  for (const auto& q : boundary_quadrature(m)) r.integrals += q.weight * P.value(q.x);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (!(r.integrals(i, j) > 1e-12)) r.failing.emplace_back(i, j);
    }
  }
  r.pass = r.failing.empty();
  return r;
}

AsmpReport validate_asmp(const MatrixField& A, const MatrixField& Sigma, const MatrixField& M, const MatrixField& P,
                         const Mesh& m) {
  if (A.k() != Sigma.k() || A.k() != M.k() || A.k() != P.k()) {
    throw InvalidParameter("validate_asmp: fields disagree on k");
  }
  auto definite = [&](const MatrixField& f) {
    auto pts = sample_points(f, m);
    return validate_psd(f, pts).positive_definite_somewhere;
  };
  AsmpReport r;
  r.a_definite = definite(A);
  r.sigma_definite = definite(Sigma);
  r.m_definite = definite(M);
  r.p_definite = definite(P);
  r.stiffness_clause = r.a_definite || r.sigma_definite;
  r.mass_clause = r.m_definite || r.p_definite;
  r.pass = r.stiffness_clause && r.mass_clause;
  return r;
}

SpectralFactor spectral_decompose(const Eigen::MatrixXd& mat) {
  if (mat.rows() != mat.cols()) throw InvalidParameter("spectral_decompose: matrix must be square");
  const Eigen::Index n = mat.rows();
  if (n > 0 && (mat - mat.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw ValidationError("spectral_decompose: input is not symmetric");
  }
  Eigen::MatrixXd a = 0.5 * (mat + mat.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = a.norm();

  auto off_norm = [&]() {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i != j) s += a(i, j) * a(i, j);
      }
    }
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  while (scale > 0.0 && off_norm() > 1e-13 * scale) {
    if (++sweep > kMaxSweeps) throw NumericalError("spectral_decompose: Jacobi sweeps did not converge");
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (apq == 0.0) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (Eigen::Index r = 0; r < n; ++r) {
          double arp = a(r, p);
          double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          double apr = a(p, r);
          double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          double vrp = v(r, p);
          double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  SpectralFactor f;
  f.D.resize(n);
  f.Q.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    f.D(i) = a(order[i], order[i]);
    f.Q.row(i) = v.col(order[i]).transpose();
  }
  return f;
}

std::pair<double, double> lambda_extremes(const MatrixField& P, Point x) {
  SpectralFactor f = spectral_decompose(P.value(x));
  double lo = f.D.minCoeff();
  double hi = f.D.maxCoeff();
  if (lo < -kPsdTol) {
    throw ValidationError("field " + P.name() + " is not positive semidefinite at " + point_str(x) +
                          " (eigenvalue " + std::to_string(lo) + ")");
  }
  return {lo, hi};
}

}  // namespace srlab

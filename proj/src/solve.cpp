#include "srlab/solve.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <sstream>

#include "srlab/error.hpp"

namespace srlab {

double pick_delta(const Spectrum& sp, int j) {
  if (j < 1 || j + 1 > sp.count()) {
    throw InvalidParameter("pick_delta: gap index j=" + std::to_string(j) + " needs j+1 <= " +
                           std::to_string(sp.count()) + " computed eigenvalues");
  }
  const double lo = sp.eigenvalues(j - 1);
  const double hi = sp.eigenvalues(j);
  const double scale = std::max(std::abs(lo), std::abs(hi));
  if (!(hi - lo > 1e-6 * scale) || scale == 0.0) {
    std::ostringstream os;
    os << "resonant cluster: mu_" << j << " = " << lo << " and mu_" << j + 1 << " = " << hi
       << " leave no usable gap";
    throw ResonanceError(os.str());
  }
  const double delta = 0.5 * (lo + hi);
  for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) {
    if (std::abs(delta - sp.eigenvalues(i)) <= 1e-8 * std::abs(hi)) {
      throw ResonanceError("resonant cluster: delta coincides with mu_" + std::to_string(i + 1));
    }
  }
  return delta;
}

struct BoundaryCondensedOperator::Impl {
  std::vector<int> interior;
  std::vector<int> pos;  // dof -> index within its block
  std::vector<bool> on_boundary;
  SparseMatrix S_II;
  SparseMatrix S_IB;
  Eigen::SimplicialLLT<SparseMatrix> chol;
  Eigen::MatrixXd X;   // S_II^-1 S_IB
  Eigen::MatrixXd T0;  // S_BB - S_BI X
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

BoundaryCondensedOperator::BoundaryCondensedOperator(const GramPair& g)
    : impl_(std::make_unique<Impl>()), n_(g.size()), bdofs_(g.boundary_dofs) {
  auto& d = *impl_;
  d.on_boundary.assign(static_cast<std::size_t>(n_), false);
  d.pos.assign(static_cast<std::size_t>(n_), -1);
  for (std::size_t i = 0; i < bdofs_.size(); ++i) {
    d.on_boundary[static_cast<std::size_t>(bdofs_[i])] = true;
    d.pos[static_cast<std::size_t>(bdofs_[i])] = static_cast<int>(i);
  }
  for (int i = 0; i < n_; ++i) {
    if (!d.on_boundary[static_cast<std::size_t>(i)]) {
      d.pos[static_cast<std::size_t>(i)] = static_cast<int>(d.interior.size());
      d.interior.push_back(i);
    }
  }
  const int ni = static_cast<int>(d.interior.size());
  const int nb = static_cast<int>(bdofs_.size());

  std::vector<Eigen::Triplet<double>> tii, tib;
  Eigen::MatrixXd S_BB = Eigen::MatrixXd::Zero(nb, nb);
  for (int c = 0; c < g.S.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(g.S, c); it; ++it) {
      const auto r = static_cast<std::size_t>(it.row());
      const auto cc = static_cast<std::size_t>(it.col());
      const bool rb = d.on_boundary[r], cb = d.on_boundary[cc];
      if (!rb && !cb) tii.emplace_back(d.pos[r], d.pos[cc], it.value());
      else if (!rb && cb) tib.emplace_back(d.pos[r], d.pos[cc], it.value());
      else if (rb && cb) S_BB(d.pos[r], d.pos[cc]) += it.value();
    }
  }
  d.S_II.resize(ni, ni);
  d.S_II.setFromTriplets(tii.begin(), tii.end());
  d.S_IB.resize(ni, nb);
  d.S_IB.setFromTriplets(tib.begin(), tib.end());

  if (ni > 0) {
    d.chol.compute(d.S_II);
    if (d.chol.info() != Eigen::Success) throw NumericalError("interior block of S is not positive definite");
    d.X = d.chol.solve(Eigen::MatrixXd(d.S_IB));
    d.T0 = S_BB - Eigen::MatrixXd(d.S_IB.transpose()) * d.X;
  } else {
    d.X.resize(0, nb);
    d.T0 = S_BB;
  }
  d.T0 = 0.5 * (d.T0 + d.T0.transpose());
}

BoundaryCondensedOperator::~BoundaryCondensedOperator() = default;
BoundaryCondensedOperator::BoundaryCondensedOperator(BoundaryCondensedOperator&&) noexcept = default;
BoundaryCondensedOperator& BoundaryCondensedOperator::operator=(BoundaryCondensedOperator&&) noexcept = default;

void BoundaryCondensedOperator::factor(const SparseMatrix& C) {
  auto& d = *impl_;
  if (C.rows() != n_ || C.cols() != n_) throw InvalidParameter("boundary correction has the wrong size");
  Eigen::MatrixXd T = d.T0;
  for (int c = 0; c < C.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(C, c); it; ++it) {
      const auto r = static_cast<std::size_t>(it.row());
      const auto cc = static_cast<std::size_t>(it.col());
      if (!d.on_boundary[r] || !d.on_boundary[cc]) {
        if (it.value() != 0.0) throw InvalidParameter("boundary correction touches an interior DOF");
        continue;
      }
      T(d.pos[r], d.pos[cc]) -= it.value();
    }
  }
  if (T.size() == 0) {
    rcond_ = 1.0;
    return;
  }
  d.lu.compute(T);
  rcond_ = d.lu.rcond();
  if (!(rcond_ >= 1e-12)) {
    std::ostringstream os;
    os << "operator is singular (reciprocal condition " << rcond_ << "); delta is resonant";
    throw ResonanceError(os.str());
  }
}

Eigen::VectorXd BoundaryCondensedOperator::solve(const Eigen::VectorXd& rhs) const {
  const auto& d = *impl_;
  if (rhs.size() != n_) throw InvalidParameter("right-hand side has the wrong length");
  const auto ni = static_cast<Eigen::Index>(d.interior.size());
  const auto nb = static_cast<Eigen::Index>(bdofs_.size());
  Eigen::VectorXd rI(ni), rB(nb);
  for (Eigen::Index i = 0; i < ni; ++i) rI(i) = rhs(d.interior[static_cast<std::size_t>(i)]);
  for (Eigen::Index i = 0; i < nb; ++i) rB(i) = rhs(bdofs_[static_cast<std::size_t>(i)]);
  Eigen::VectorXd y = ni > 0 ? Eigen::VectorXd(d.chol.solve(rI)) : Eigen::VectorXd();
  Eigen::VectorXd uB = nb > 0 ? Eigen::VectorXd(d.lu.solve(rB - d.S_IB.transpose() * y)) : Eigen::VectorXd();
  Eigen::VectorXd uI = ni > 0 ? Eigen::VectorXd(y - d.X * uB) : Eigen::VectorXd();
  Eigen::VectorXd U(n_);
  for (Eigen::Index i = 0; i < ni; ++i) U(d.interior[static_cast<std::size_t>(i)]) = uI(i);
  for (Eigen::Index i = 0; i < nb; ++i) U(bdofs_[static_cast<std::size_t>(i)]) = uB(i);
  return U;
}

Eigen::VectorXd solve_linear_L(const GramPair& g, double delta, const Eigen::VectorXd& rhs) {
  BoundaryCondensedOperator op(g);
  op.factor(SparseMatrix(delta * g.B_P));
  return op.solve(rhs);
}

const char* to_string(HomotopyStatus s) {
  switch (s) {
    case HomotopyStatus::Converged: return "converged";
    case HomotopyStatus::BoundExceeded: return "bound-exceeded";
    case HomotopyStatus::NewtonFailed: return "newton-failed";
  }
  return "unknown";
}

double energy_norm(const GramPair& g, const Eigen::VectorXd& U) {
  return std::sqrt(std::max(0.0, U.dot(g.S * U)));
}

Eigen::VectorXd homotopy_residual(const GramPair& g, const BoundaryNonlinearity& gnl, const Mesh& m,
                                  const Eigen::VectorXd& U, double lambda, double delta) {
  Eigen::VectorXd r = g.S * U - ((1.0 - lambda) * delta) * (g.B_P * U);
  if (lambda != 0.0) r -= lambda * assemble_boundary_load(m, gnl, U);
  return r;
}

HomotopyTrace homotopy_solve(const GramPair& g, const BoundaryNonlinearity& gnl, const Mesh& m, double delta,
                             const HomotopyOptions& opts) {
  if (opts.steps < 1) throw InvalidParameter("homotopy_solve: steps must be >= 1");
  if (!(opts.newton.tol > 0.0) || opts.newton.maxit < 1) throw InvalidParameter("homotopy_solve: bad Newton options");
  if (gnl.k() != g.k) throw InvalidParameter("homotopy_solve: nonlinearity has the wrong component count");
  if (opts.cap && !(*opts.cap > 0.0)) throw InvalidParameter("homotopy_solve: cap must be positive");

  HomotopyTrace tr;
  tr.delta = delta;
  tr.tol = opts.newton.tol;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(g.size());
  tr.cap = opts.cap.value_or(1e6 * (1.0 + assemble_boundary_load(m, gnl, zero).norm()));

  BoundaryCondensedOperator op(g);
  const SparseMatrix shifted_P = delta * g.B_P;
  op.factor(shifted_P);  // resonant anchor: the zero residual at lambda = 0 never reaches a factor
  Eigen::VectorXd U = zero;

  for (int step = 0; step <= opts.steps; ++step) {
    const double lambda = static_cast<double>(step) / opts.steps;
    Eigen::VectorXd R = homotopy_residual(g, gnl, m, U, lambda, delta);
    double res = R.norm();
    double energy = energy_norm(g, U);
    int it = 0;
    while (res > opts.newton.tol * (1.0 + energy)) {
      if (it == opts.newton.maxit) {
        tr.status = HomotopyStatus::NewtonFailed;
        tr.failed_lambda = lambda;
        tr.failed_energy = energy;
        tr.failed_residual = res;
        tr.message = "Newton did not converge in " + std::to_string(it) + " iterations";
        tr.U = U;
        return tr;
      }
      SparseMatrix C = (1.0 - lambda) * shifted_P;
      if (lambda != 0.0) C += lambda * assemble_boundary_jacobian(m, gnl, U, opts.allow_fd);
      try {
        op.factor(C);
      } catch (const ResonanceError& e) {
        if (lambda == 0.0) throw;
        tr.status = HomotopyStatus::NewtonFailed;
        tr.failed_lambda = lambda;
        tr.failed_energy = energy;
        tr.failed_residual = res;
        tr.message = std::string("singular Jacobian: ") + e.what();
        tr.U = U;
        return tr;
      }
      const Eigen::VectorXd dU = op.solve(-R);
      // Backtrack on |R| when the full step overshoots.
      double t = 1.0;
      Eigen::VectorXd trial = U + dU;
      Eigen::VectorXd Rt = homotopy_residual(g, gnl, m, trial, lambda, delta);
      for (int h = 0; h < 10 && Rt.norm() > res; ++h) {
        t *= 0.5;
        trial = U + t * dU;
        Rt = homotopy_residual(g, gnl, m, trial, lambda, delta);
      }
      U = std::move(trial);
      R = std::move(Rt);
      res = R.norm();
      energy = energy_norm(g, U);
      ++it;
      if (energy > tr.cap) {
        tr.status = HomotopyStatus::BoundExceeded;
        tr.failed_lambda = lambda;
        tr.failed_energy = energy;
        tr.failed_residual = res;
        std::ostringstream os;
        os << "energy norm " << energy << " exceeds cap " << tr.cap << " at lambda " << lambda;
        tr.message = os.str();
        return tr;
      }
    }
    tr.steps.push_back({lambda, it, res, energy});
    tr.U = U;
  }
  tr.status = HomotopyStatus::Converged;
  return tr;
}

ResidualReport residual_report(const GramPair& g, const BoundaryNonlinearity& gnl, const Mesh& m,
                               const Eigen::VectorXd& U, double lambda, double delta) {
  ResidualReport r;
  r.residual = homotopy_residual(g, gnl, m, U, lambda, delta).norm();
  r.energy = energy_norm(g, U);
  r.mass = std::sqrt(std::max(0.0, U.dot(g.B * U)));
  r.trace = std::sqrt(std::max(0.0, U.dot(assemble_boundary_mass(m, g.k) * U)));
  return r;
}

PicardResult picard_solve(const GramPair& g, const BoundaryNonlinearity& gnl, const Mesh& m, double delta,
                          const PicardOptions& opts) {
  if (!(opts.omega > 0.0 && opts.omega <= 1.0)) throw InvalidParameter("picard_solve: omega must be in (0, 1]");
  if (gnl.k() != g.k) throw InvalidParameter("picard_solve: nonlinearity has the wrong component count");
  BoundaryCondensedOperator op(g);
  op.factor(SparseMatrix(delta * g.B_P));
  PicardResult out;
  Eigen::VectorXd U = Eigen::VectorXd::Zero(g.size());
  for (int it = 1; it <= opts.maxit; ++it) {
    Eigen::VectorXd V = op.solve(assemble_boundary_load(m, gnl, U) - delta * (g.B_P * U));
    Eigen::VectorXd next = (1.0 - opts.omega) * U + opts.omega * V;
    const double inc = energy_norm(g, next - U) / (1.0 + energy_norm(g, next));
    U = std::move(next);
    out.iterations = it;
    out.last_increment = inc;
    if (!std::isfinite(inc)) break;
    if (inc <= opts.tol) {
      out.converged = true;
      break;
    }
  }
  out.U = std::move(U);
  return out;
}

}  // namespace srlab

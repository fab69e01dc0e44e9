#include "srlab/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>

#include "srlab/error.hpp"
#include "srlab/linalg.hpp"

namespace srlab {

namespace {

// Pivot floor relative to the largest diagonal entry; below it the matrix is
// treated as singular.
constexpr double kPivotFloor = 1e-12;

struct Partition {
  std::vector<int> weighted;    // DOFs with a nonzero B row
  std::vector<int> unweighted;  // DOFs whose B row vanishes
  std::vector<int> local;       // DOF -> index within its class
  std::vector<bool> is_weighted;
};

Partition partition_by_mass(const SparseMatrix& B) {
  const int n = static_cast<int>(B.rows());
  Partition p;
  p.local.assign(n, -1);
  p.is_weighted.assign(n, false);
  Eigen::VectorXd diag = B.diagonal();
  for (int i = 0; i < n; ++i) {
    if (diag(i) > 0.0) {
      p.is_weighted[i] = true;
      p.local[i] = static_cast<int>(p.weighted.size());
      p.weighted.push_back(i);
    } else {
      p.local[i] = static_cast<int>(p.unweighted.size());
      p.unweighted.push_back(i);
    }
  }
  return p;
}

struct Blocks {
  SparseMatrix zz;      // unweighted x unweighted
  SparseMatrix zw;      // unweighted x weighted
  Eigen::MatrixXd ww;   // weighted x weighted
};

Blocks split(const SparseMatrix& a, const Partition& p) {
  const int nz = static_cast<int>(p.unweighted.size());
  const int nw = static_cast<int>(p.weighted.size());
  std::vector<Eigen::Triplet<double>> tzz, tzw;
  Blocks b;
  b.ww = Eigen::MatrixXd::Zero(nw, nw);
  for (int col = 0; col < a.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      int r = static_cast<int>(it.row());
      int c = static_cast<int>(it.col());
      bool rw = p.is_weighted[r];
      bool cw = p.is_weighted[c];
      if (rw && cw) {
        b.ww(p.local[r], p.local[c]) += it.value();
      } else if (!rw && !cw) {
        tzz.emplace_back(p.local[r], p.local[c], it.value());
      } else if (!rw && cw) {
        tzw.emplace_back(p.local[r], p.local[c], it.value());
      }
    }
  }
  b.zz.resize(nz, nz);
  b.zz.setFromTriplets(tzz.begin(), tzz.end());
  b.zw.resize(nz, nw);
  b.zw.setFromTriplets(tzw.begin(), tzw.end());
  return b;
}

bool factor_ok(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& a) {
  if (llt.info() != Eigen::Success) return false;
  if (a.rows() == 0) return true;
  Eigen::VectorXd piv = llt.matrixLLT().diagonal().array().square();
  double dmax = a.diagonal().cwiseAbs().maxCoeff();
  return piv.allFinite() && piv.minCoeff() > kPivotFloor * dmax;
}

double max_abs(const Eigen::MatrixXd& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Spectrum solve_eigs(const GramPair& g, const EigenOptions& opts) {
  const int n = g.size();
  if (opts.count < 0) throw InvalidParameter("solve_eigs: count must be >= 0");
  if (opts.shift && *opts.shift < 0.0) throw InvalidParameter("solve_eigs: shift must be >= 0");

  Partition part = partition_by_mass(g.B);
  if (part.weighted.empty()) throw ValidationError("no spectrum: the weight matrix B vanishes identically");
  const int nz = static_cast<int>(part.unweighted.size());
  const int nw = static_cast<int>(part.weighted.size());

  Blocks s = split(g.S, part);
  Blocks b = split(g.B, part);

  // Exact elimination of the unweighted DOFs (B vanishes there, so the shift
  // does not enter these blocks).
  Eigen::MatrixXd elim;  // S_zz^-1 S_zw
  Eigen::MatrixXd schur = s.ww;
  if (nz > 0) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(s.zz);
    bool ok = ldlt.info() == Eigen::Success;
    if (ok) {
      Eigen::VectorXd d = ldlt.vectorD();
      ok = d.allFinite() && d.minCoeff() > kPivotFloor * s.zz.diagonal().cwiseAbs().maxCoeff();
    }
    if (!ok) {
      throw NumericalError(
          "solve_eigs: the stiffness block on B-null DOFs is singular (the pencil has a common null vector)");
    }
    elim = ldlt.solve(Eigen::MatrixXd(s.zw));
    schur.noalias() -= Eigen::MatrixXd(s.zw.transpose()) * elim;
  }
  schur = 0.5 * (schur + schur.transpose()).eval();
  Eigen::MatrixXd bww = 0.5 * (b.ww + b.ww.transpose());

  double sigma = opts.shift.value_or(0.0);
  Eigen::MatrixXd kc = schur + sigma * bww;
  Eigen::LLT<Eigen::MatrixXd> llt(kc);
  if (!factor_ok(llt, kc)) {
    if (opts.shift) {
      throw NumericalError("solve_eigs: S + " + std::to_string(sigma) + " B is not positive definite");
    }
    sigma = opts.auto_shift;
    kc = schur + sigma * bww;
    llt.compute(kc);
    if (!factor_ok(llt, kc)) throw NumericalError("solve_eigs: factorization failed after shift");
  }

  // C = L^-1 B L^-T
  const auto L = llt.matrixL();
  Eigen::MatrixXd t = L.solve(bww);
  Eigen::MatrixXd c = L.solve(t.transpose());
  c = 0.5 * (c + c.transpose()).eval();
  SymmetricEigen eig = symmetric_eigen(c);

  const double theta_max = eig.values.size() ? eig.values(eig.values.size() - 1) : 0.0;
  if (!(theta_max > 0.0)) throw NumericalError("solve_eigs: reduced weight matrix has no positive eigenvalue");
  std::vector<Eigen::Index> finite;  // descending theta == ascending mu
  for (Eigen::Index i = eig.values.size() - 1; i >= 0; --i) {
    if (eig.values(i) >= opts.kernel_threshold * theta_max) finite.push_back(i);
  }

  Spectrum sp;
  sp.k = g.k;
  sp.shift_used = sigma;
  sp.kernel_threshold = opts.kernel_threshold;
  sp.finite_count = static_cast<int>(finite.size());
  sp.kernel_dim = n - sp.finite_count;
  if (opts.count > sp.finite_count && !opts.clamp_count) {
    throw InvalidParameter("solve_eigs: requested " + std::to_string(opts.count) + " eigenpairs but only " +
                           std::to_string(sp.finite_count) + " finite eigenvalues exist");
  }

  const int m = std::min(opts.count, sp.finite_count);
  sp.eigenvalues.resize(m);
  sp.eigenvectors = Eigen::MatrixXd::Zero(n, m);
  const auto LT = llt.matrixU();
  for (int j = 0; j < m; ++j) {
    Eigen::Index idx = finite[static_cast<std::size_t>(j)];
    double theta = eig.values(idx);
    sp.eigenvalues(j) = 1.0 / theta - sigma;
    Eigen::VectorXd uw = LT.solve(eig.vectors.col(idx)) / std::sqrt(theta);
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < nw; ++i) full(part.weighted[i]) = uw(i);
    if (nz > 0) {
      Eigen::VectorXd uz = -elim * uw;
      for (int i = 0; i < nz; ++i) full(part.unweighted[i]) = uz(i);
    }
    double bn = std::sqrt(full.dot(g.B * full));
    full /= bn;
    Eigen::Index imax = 0;
    full.cwiseAbs().maxCoeff(&imax);
    if (full(imax) < 0) full = -full;
    sp.eigenvectors.col(j) = full;
  }

  if (m > 0) {
    Eigen::MatrixXd bphi = g.B * sp.eigenvectors;
    Eigen::MatrixXd sphi = g.S * sp.eigenvectors;
    Eigen::MatrixXd gram_b = sp.eigenvectors.transpose() * bphi;
    Eigen::MatrixXd gram_s = sp.eigenvectors.transpose() * sphi;
    sp.orthonormality_error = max_abs(gram_b - Eigen::MatrixXd::Identity(m, m));
    Eigen::MatrixXd diag = sp.eigenvalues.asDiagonal();
    sp.diagonality_error = max_abs(gram_s - diag);
  }
  return sp;
}

Expansion expand(const Spectrum& sp, const GramPair& g, const Eigen::VectorXd& U) {
  if (U.size() != g.size()) throw InvalidParameter("expand: U has wrong length");
  Expansion e;
  e.coefficients = sp.eigenvectors.transpose() * (g.B * U);
  Eigen::VectorXd su = sp.eigenvectors.transpose() * (g.S * U);
  double mu_max = sp.count() ? sp.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  double cscale = std::max(1.0, e.coefficients.size() ? e.coefficients.cwiseAbs().maxCoeff() : 0.0);
  for (int j = 0; j < sp.count(); ++j) {
    double mu = sp.eigenvalues(j);
    if (mu > 1e-8 * std::max(1.0, mu_max)) {
      e.formula_discrepancy = std::max(e.formula_discrepancy, std::abs(e.coefficients(j) - su(j) / mu) / cscale);
    }
  }
  Eigen::VectorXd rem = U - sp.eigenvectors * e.coefficients;
  e.remainder_norm = std::sqrt(std::max(0.0, rem.dot(g.B * rem)));
  return e;
}

ParsevalResiduals parseval_check(const Spectrum& sp, const GramPair& g, const Eigen::VectorXd& U) {
  Eigen::VectorXd c = sp.eigenvectors.transpose() * (g.B * U);
  double energy = U.dot(g.S * U);
  double mass = U.dot(g.B * U);
  double energy_sum = (sp.eigenvalues.array() * c.array().square()).sum();
  double mass_sum = c.squaredNorm();
  auto rel = [](double exact, double approx) {
    double diff = std::abs(exact - approx);
    if (diff == 0.0) return 0.0;
    double scale = std::max(std::abs(exact), std::abs(approx));
    return diff / scale;
  };
  return {rel(energy, energy_sum), rel(mass, mass_sum)};
}

KernelBasis hmp_kernel(const GramPair& g, double threshold) {
  const int n = g.size();
  Partition part = partition_by_mass(g.B);
  Blocks b = split(g.B, part);
  std::vector<Eigen::VectorXd> cols;
  for (int i : part.unweighted) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(i) = 1.0;
    cols.push_back(std::move(e));
  }
  if (!part.weighted.empty()) {
    SymmetricEigen eig = symmetric_eigen(0.5 * (b.ww + b.ww.transpose()));
    double top = eig.values.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      if (eig.values(i) < threshold * top) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        for (std::size_t r = 0; r < part.weighted.size(); ++r) e(part.weighted[r]) = eig.vectors(r, i);
        cols.push_back(std::move(e));
      }
    }
  }
  KernelBasis kb;
  kb.dimension = static_cast<int>(cols.size());
  kb.basis.resize(n, kb.dimension);
  for (int j = 0; j < kb.dimension; ++j) kb.basis.col(j) = cols[static_cast<std::size_t>(j)];
  return kb;
}

SignVerdict sign_check_first(const Spectrum& sp, const Mesh& m) {
  if (sp.count() < 1) throw InvalidParameter("sign_check_first: spectrum has no eigenpairs");
  if (sp.eigenvectors.rows() != static_cast<Eigen::Index>(m.num_vertices()) * sp.k) {
    throw InvalidParameter("sign_check_first: spectrum does not match the mesh");
  }
  SignVerdict v;
  v.min_value.assign(sp.k, 0.0);
  v.max_value.assign(sp.k, 0.0);
  v.one_signed.assign(sp.k, false);
  if (sp.count() >= 2) {
    double mu1 = sp.eigenvalues(0);
    double mu2 = sp.eigenvalues(1);
    if (mu2 - mu1 <= 1e-8 * std::abs(mu2)) {
      v.status = SignVerdict::Status::InconclusiveMultiple;
      return v;
    }
  }
  const auto phi = sp.eigenvectors.col(0);
  const double tol = 1e-10 * phi.cwiseAbs().maxCoeff();
  bool all = true;
  for (int a = 0; a < sp.k; ++a) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int node = 0; node < m.num_vertices(); ++node) {
      double val = phi(node * sp.k + a);
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
    v.min_value[a] = lo;
    v.max_value[a] = hi;
    v.one_signed[a] = lo >= -tol || hi <= tol;
    all = all && v.one_signed[a];
  }
  v.status = all ? SignVerdict::Status::OneSigned : SignVerdict::Status::SignChange;
  return v;
}

}  // namespace srlab

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "srlab/expr.hpp"
#include "srlab/mesh.hpp"

namespace srlab {

enum class Support { Interior, Boundary };

/// k x k matrix-valued coefficient field with one x-only expression per entry.
class MatrixField {
 public:
  /// `entries` is row-major, k*k long, each parsed as a coefficient expression.
  MatrixField(std::string name, Support support, int k, std::vector<Expr> entries);

  static MatrixField zero(std::string name, Support support, int k);
  static MatrixField constant(std::string name, Support support, int k, std::span<const double> row_major);
  static MatrixField identity(std::string name, Support support, int k, double scale = 1.0);
  static MatrixField from_strings(std::string name, Support support, const std::vector<std::vector<std::string>>& rows);

  const std::string& name() const noexcept { return name_; }
  Support support() const noexcept { return support_; }
  int k() const noexcept { return k_; }
  const Expr& entry(int i, int j) const { return entries_.at(static_cast<std::size_t>(i * k_ + j)); }

  /// Evaluates every entry at x. Evaluation errors are rethrown with field/entry/point context.
  Eigen::MatrixXd value(Point x) const;
  /// True when every entry is the literal constant 0.
  bool is_zero() const;

 private:
  std::string name_;
  Support support_;
  int k_;
  std::vector<Expr> entries_;
};

/// Default validation points: assembly quadrature points for the field's support.
std::vector<Point> sample_points(const MatrixField& f, const Mesh& m);

struct EntryViolation {
  int row;
  int col;
  Point at;
  double value;
};

struct NonnegativeReport {
  std::string field;
  bool pass = false;
  bool strictly_positive_somewhere = false;
  bool positivity_required = false;
  std::size_t samples = 0;
  std::vector<EntryViolation> violations;
  /// Free-form flags such as "nowhere strictly positive". Verdicts are sampled.
  std::vector<std::string> notes;
};

/// Entrywise m_ij(x) >= -1e-12 at every sample. When `require_positive_somewhere`
/// is set, PASS also needs one sample with some entry > 1e-12.
NonnegativeReport validate_nonnegative(const MatrixField& f, std::span<const Point> pts,
                                       bool require_positive_somewhere = false);

struct PsdReport {
  std::string field;
  bool pass = false;
  double worst_eigenvalue = 0.0;
  Point worst_point;
  bool positive_definite_somewhere = false;
  bool positive_definite_everywhere = false;
  std::size_t samples = 0;
};

/// Smallest eigenvalue >= -1e-10 at every sample. Throws ValidationError when a
/// sampled value is asymmetric beyond 1e-12.
PsdReport validate_psd(const MatrixField& f, std::span<const Point> pts);

struct MpIntegralReport {
  bool pass = false;
  Eigen::MatrixXd integrals;  // int m_ij dx + int rho_ij ds
  std::vector<std::pair<int, int>> failing;
};

/// Entrywise integral of M over the interior plus P over the boundary, which must exceed 1e-12.
MpIntegralReport validate_mp_integral(const MatrixField& M, const MatrixField& P, const Mesh& m);

struct AsmpReport {
  bool pass = false;
  bool stiffness_clause = false;  // A or Sigma positive definite somewhere
  bool mass_clause = false;       // M or P positive definite somewhere
  bool a_definite = false;
  bool sigma_definite = false;
  bool m_definite = false;
  bool p_definite = false;
};

AsmpReport validate_asmp(const MatrixField& A, const MatrixField& Sigma, const MatrixField& M, const MatrixField& P,
                         const Mesh& m);

/// mat = Q^T diag(D) Q with orthogonal Q (rows are eigenvectors), D descending.
struct SpectralFactor {
  Eigen::MatrixXd Q;
  Eigen::VectorXd D;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is below 1e-13 (relative).
SpectralFactor spectral_decompose(const Eigen::MatrixXd& mat);

/// (smallest, largest) eigenvalue of P(x). Throws ValidationError when P(x) is not PSD.
std::pair<double, double> lambda_extremes(const MatrixField& P, Point x);

}  // namespace srlab

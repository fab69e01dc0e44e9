#pragma once

// Seeded generators for property tests. Everything derives from mt19937_64 so
// failures replay from the seed printed in the assertion message.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace testgen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  bool coin() { return integer(0, 1) == 1; }

  Eigen::VectorXd vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Eigen::MatrixXd matrix(Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal();
    return m;
  }

  Eigen::MatrixXd symmetric(int k) {
    Eigen::MatrixXd a = matrix(k, k);
    return 0.5 * (a + a.transpose());
  }

  /// G G^T with G k x rank; rank < k gives a singular PSD matrix.
  Eigen::MatrixXd psd(int k, int rank) {
    Eigen::MatrixXd g = matrix(k, rank);
    Eigen::MatrixXd a = g * g.transpose();
    return 0.5 * (a + a.transpose());
  }

  Eigen::MatrixXd orthogonal(int k) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(matrix(k, k));
    return qr.householderQ();
  }

  /// Smooth random expression over x1, x2, u1..uk without abs/min/max or
  /// fractional powers, so diff_u applies. Values stay moderate.
  std::string smooth_expr(int depth, int k) {
    if (depth <= 0 || integer(0, 4) == 0) return leaf(k);
    const std::string a = smooth_expr(depth - 1, k);
    switch (integer(0, 10)) {
      case 0: return "(" + a + ") + (" + smooth_expr(depth - 1, k) + ")";
      case 1: return "(" + a + ") - (" + smooth_expr(depth - 1, k) + ")";
      case 2: return "(" + a + ") * (" + smooth_expr(depth - 1, k) + ")";
      case 3: return "(" + a + ") / (2 + (" + smooth_expr(depth - 1, k) + ")^2)";
      case 4: return "sin(" + a + ")";
      case 5: return "cos(" + a + ")";
      case 6: return "atan(" + a + ")";
      case 7: return "exp(atan(" + a + "))";
      case 8: return "log(1 + (" + a + ")^2)";
      case 9: return "sqrt(1 + (" + a + ")^2)";
      default: return "(" + a + ")^" + std::to_string(integer(2, 3));
    }
  }

 private:
  std::string leaf(int k) {
    switch (integer(0, 3)) {
      case 0: return std::to_string(integer(-3, 3)) + "." + std::to_string(integer(0, 9));
      case 1: return coin() ? "x1" : "x2";
      default: return "u" + std::to_string(integer(1, k));
    }
  }

  std::mt19937_64 eng_;
};

}  // namespace testgen

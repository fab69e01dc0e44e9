#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "srlab/expr.hpp"

namespace srlab {

/// Boundary nonlinearity g(x, U) = (g_1, ..., g_k) with symbolic Jacobian
/// entries where they exist. Components may use x1, x2, n1, n2, u1..uk.
class BoundaryNonlinearity {
 public:
  explicit BoundaryNonlinearity(std::vector<Expr> components);
  static BoundaryNonlinearity parse(const std::vector<std::string>& sources);

  int k() const noexcept { return static_cast<int>(g_.size()); }
  const Expr& component(int a) const { return g_.at(static_cast<std::size_t>(a)); }

  /// True when every dg_a/du_b has a symbolic form.
  bool differentiable() const noexcept { return differentiable_; }
  /// Why the symbolic Jacobian is unavailable (empty when differentiable()).
  const std::string& nondifferentiable_reason() const noexcept { return reason_; }

  void evaluate(const EvalPoint& at, std::span<double> out) const;

  /// out(a, b) = dg_a/du_b. Entries without a symbolic form use central
  /// differences with step 1e-6 (1 + |u_b|) when allow_fd, else throw NonDifferentiable.
  void jacobian(const EvalPoint& at, Eigen::Ref<Eigen::MatrixXd> out, bool allow_fd = true) const;

 private:
  std::vector<Expr> g_;
  std::vector<std::optional<Expr>> dg_;  // row-major k x k
  bool differentiable_ = true;
  std::string reason_;
};

}  // namespace srlab

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "srlab/mesh.hpp"

namespace srlab {

/// Point at which an expression is evaluated. `normal` is the outward unit
/// normal (only meaningful on boundary edges); `u` holds the k solution components.
struct EvalPoint {
  Point x;
  Point normal;
  std::span<const double> u;
};

/// Immutable scalar expression tree.
///
/// Grammar (whitespace-insensitive):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?          right-associative
///     primary := number | variable | func '(' expr (',' expr)* ')' | '(' expr ')'
///
/// Variables: x1, x2 (position), n1, n2 (outward normal), u1..uk (components).
/// Functions: sin cos exp log sqrt abs atan (unary), min max (binary).
class Expr {
 public:
  struct Node;

  Expr();  // the constant 0
  explicit Expr(std::shared_ptr<const Node> root, int components);

  double eval(const EvalPoint& at) const;
  double eval(Point x, std::span<const double> u = {}) const;

  /// Canonical text form; parse(str()) reproduces the same tree.
  std::string str() const;

  /// Declared component count (0 for coefficient expressions).
  int components() const noexcept { return k_; }
  bool depends_on_u() const;
  bool depends_on_u(std::size_t component) const;
  bool depends_on_normal() const;
  /// True when no variable appears.
  bool is_constant() const;

  const std::shared_ptr<const Node>& root() const noexcept { return root_; }

 private:
  std::shared_ptr<const Node> root_;
  int k_ = 0;
};

/// Parses an expression over x1, x2, n1, n2, u1..uk. Requires k >= 1.
Expr parse(std::string_view src, int k);

/// Parses a coefficient expression: only x1 and x2 may appear.
Expr parse_coefficient(std::string_view src);

Expr constant_expr(double value);

/// d e / d u_{component+1}  (component is 0-based). Throws NonDifferentiable when
/// abs/min/max, or a power with non-integer exponent, depends on that component.
Expr diff_u(const Expr& e, std::size_t component);

/// d e / d x_{axis+1}  (axis 0 or 1). Used to verify manufactured data.
Expr diff_x(const Expr& e, int axis);

}  // namespace srlab

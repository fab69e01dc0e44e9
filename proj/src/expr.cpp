#include "srlab/expr.hpp"

#include <algorithm>
#include <cctype>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <system_error>
#include <vector>

#include "srlab/error.hpp"

namespace srlab {

namespace {

enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Fn { Sin, Cos, Exp, Log, Sqrt, Abs, Atan, Min, Max };

// Variable slots: x1, x2, n1, n2, then u1..uk.
constexpr int kSlotX1 = 0;
constexpr int kSlotN1 = 2;
constexpr int kSlotU1 = 4;

struct FnInfo {
  const char* name;
  Fn fn;
  int arity;
  bool smooth;
};

constexpr std::array<FnInfo, 9> kFunctions{{
    {"sin", Fn::Sin, 1, true},
    {"cos", Fn::Cos, 1, true},
    {"exp", Fn::Exp, 1, true},
    {"log", Fn::Log, 1, true},
    {"sqrt", Fn::Sqrt, 1, true},
    {"abs", Fn::Abs, 1, false},
    {"atan", Fn::Atan, 1, true},
    {"min", Fn::Min, 2, false},
    {"max", Fn::Max, 2, false},
}};

const FnInfo& info(Fn fn) {
  for (const auto& f : kFunctions) {
    if (f.fn == fn) return f;
  }
  throw std::logic_error("unknown function id");
}

}  // namespace

struct Expr::Node {
  Kind kind = Kind::Number;
  double value = 0.0;
  int slot = 0;
  Fn fn = Fn::Sin;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_number(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Kind::Number;
  n->value = v;
  return n;
}

NodePtr make_var(int slot) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Kind::Var;
  n->slot = slot;
  return n;
}

NodePtr make_node(Kind kind, std::vector<NodePtr> args) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  n->args = std::move(args);
  return n;
}

NodePtr make_call(Fn fn, std::vector<NodePtr> args) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = Kind::Call;
  n->fn = fn;
  n->args = std::move(args);
  return n;
}

bool is_number(const NodePtr& n, double v) { return n->kind == Kind::Number && n->value == v; }

// Builders used by differentiation. They drop additive zeros and multiplicative
// ones so derivative trees stay readable; they never reorder operands.
NodePtr add(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0)) return b;
  if (is_number(b, 0.0)) return a;
  return make_node(Kind::Add, {std::move(a), std::move(b)});
}

NodePtr neg(NodePtr a) {
  if (is_number(a, 0.0)) return a;
  if (a->kind == Kind::Neg) return a->args[0];
  return make_node(Kind::Neg, {std::move(a)});
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_number(b, 0.0)) return a;
  if (is_number(a, 0.0)) return neg(std::move(b));
  return make_node(Kind::Sub, {std::move(a), std::move(b)});
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0) || is_number(b, 0.0)) return make_number(0.0);
  if (is_number(a, 1.0)) return b;
  if (is_number(b, 1.0)) return a;
  return make_node(Kind::Mul, {std::move(a), std::move(b)});
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_number(a, 0.0)) return make_number(0.0);
  if (is_number(b, 1.0)) return a;
  return make_node(Kind::Div, {std::move(a), std::move(b)});
}

NodePtr pow_node(NodePtr a, NodePtr b) {
  if (is_number(b, 1.0)) return a;
  if (is_number(b, 0.0)) return make_number(1.0);
  return make_node(Kind::Pow, {std::move(a), std::move(b)});
}

// ---------------------------------------------------------------------------
// Printing

int precedence(const Expr::Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    case Kind::Number: return n.value < 0.0 || std::signbit(n.value) ? 3 : 5;
    case Kind::Var:
    case Kind::Call: return 5;
  }
  return 5;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), end);
}

std::string slot_name(int slot) {
  switch (slot) {
    case 0: return "x1";
    case 1: return "x2";
    case 2: return "n1";
    case 3: return "n2";
    default: return "u" + std::to_string(slot - kSlotU1 + 1);
  }
}

void print(const Expr::Node& n, std::string& out);

void print_child(const Expr::Node& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print(child, out);
    out += ')';
  } else {
    print(child, out);
  }
}

void print(const Expr::Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Number:
      if (std::signbit(n.value)) {
        out += "-";
        out += format_number(-n.value);
      } else {
        out += format_number(n.value);
      }
      return;
    case Kind::Var: out += slot_name(n.slot); return;
    case Kind::Neg:
      out += '-';
      print_child(*n.args[0], 3, out);
      return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      int p = precedence(n);
      print_child(*n.args[0], p, out);
      out += n.kind == Kind::Add ? "+" : n.kind == Kind::Sub ? "-" : n.kind == Kind::Mul ? "*" : "/";
      print_child(*n.args[1], p + 1, out);
      return;
    }
    case Kind::Pow:
      print_child(*n.args[0], 5, out);
      out += '^';
      print_child(*n.args[1], 3, out);
      return;
    case Kind::Call:
      out += info(n.fn).name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ',';
        print(*n.args[i], out);
      }
      out += ')';
      return;
  }
}

std::string to_string(const Expr::Node& n) {
  std::string s;
  print(n, s);
  return s;
}

// ---------------------------------------------------------------------------
// Parsing

struct ParseOptions {
  int k = 0;
  bool allow_normal = true;
};

class Parser {
 public:
  Parser(std::string_view src, ParseOptions opts) : src_(src), opts_(opts) {}

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ < src_.size()) {
      fail("unexpected '" + std::string(1, src_[pos_]) + "'", {"operator", "end of input"});
    }
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) {
    std::string what = "syntax error at offset " + std::to_string(pos_) + ": " + msg;
    if (!expected.empty()) {
      what += " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) what += i + 1 == expected.size() ? " or " : ", ";
        what += expected[i];
      }
      what += ")";
    }
    throw ParseError(what, pos_, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(Kind::Add, {lhs, parse_term()});
      } else if (accept('-')) {
        lhs = make_node(Kind::Sub, {lhs, parse_term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(Kind::Mul, {lhs, parse_unary()});
      } else if (accept('/')) {
        lhs = make_node(Kind::Div, {lhs, parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_node(Kind::Neg, {parse_unary()});
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return make_node(Kind::Pow, {base, parse_unary()});
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    const std::vector<std::string> expected{"number", "identifier", "'('", "'-'"};
    if (pos_ >= src_.size()) fail("unexpected end of input", expected);
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (!accept(')')) fail("unbalanced parenthesis", {"')'"});
      return inner;
    }
    fail("unexpected '" + std::string(1, c) + "'", expected);
  }

  NodePtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      pos_ = start;
      fail("malformed number", {"number"});
    }
    return make_number(v);
  }

  NodePtr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    std::string name(src_.substr(start, pos_ - start));
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      const FnInfo* f = nullptr;
      for (const auto& cand : kFunctions) {
        if (name == cand.name) f = &cand;
      }
      if (!f) {
        pos_ = start;
        throw ParseError("unknown function '" + name + "' at offset " + std::to_string(start), start);
      }
      ++pos_;
      std::vector<NodePtr> args;
      args.push_back(parse_expr());
      while (accept(',')) args.push_back(parse_expr());
      if (!accept(')')) fail("expected ')' closing call to " + name, {"','", "')'"});
      if (static_cast<int>(args.size()) != f->arity) {
        throw ParseError("function '" + name + "' takes " + std::to_string(f->arity) + " argument(s), got " +
                             std::to_string(args.size()),
                         start);
      }
      return make_call(f->fn, std::move(args));
    }
    if (auto slot = variable_slot(name)) return make_var(*slot);
    throw ParseError("unknown variable '" + name + "' at offset " + std::to_string(start), start);
  }

  std::optional<int> variable_slot(const std::string& name) const {
    if (name == "x1") return 0;
    if (name == "x2") return 1;
    if (opts_.allow_normal && name == "n1") return 2;
    if (opts_.allow_normal && name == "n2") return 3;
    if (name.size() >= 2 && name[0] == 'u') {
      int idx = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (ec == std::errc() && ptr == name.data() + name.size() && name[1] != '0' && idx >= 1 && idx <= opts_.k) {
        return kSlotU1 + idx - 1;
      }
    }
    return std::nullopt;
  }

  std::string_view src_;
  ParseOptions opts_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

[[noreturn]] void domain_error(const Expr::Node& n, const std::string& why) {
  throw EvalError("evaluation error in '" + to_string(n) + "': " + why);
}

double eval_node(const Expr::Node& n, const EvalPoint& at) {
  switch (n.kind) {
    case Kind::Number: return n.value;
    case Kind::Var: {
      if (n.slot == 0) return at.x.x;
      if (n.slot == 1) return at.x.y;
      if (n.slot == 2) return at.normal.x;
      if (n.slot == 3) return at.normal.y;
      auto idx = static_cast<std::size_t>(n.slot - kSlotU1);
      if (idx >= at.u.size()) domain_error(n, "component not supplied");
      return at.u[idx];
    }
    case Kind::Neg: return -eval_node(*n.args[0], at);
    case Kind::Add: return eval_node(*n.args[0], at) + eval_node(*n.args[1], at);
    case Kind::Sub: return eval_node(*n.args[0], at) - eval_node(*n.args[1], at);
    case Kind::Mul: return eval_node(*n.args[0], at) * eval_node(*n.args[1], at);
    case Kind::Div: {
      double den = eval_node(*n.args[1], at);
      if (den == 0.0) domain_error(n, "division by zero");
      double r = eval_node(*n.args[0], at) / den;
      if (!std::isfinite(r)) domain_error(n, "non-finite quotient");
      return r;
    }
    case Kind::Pow: {
      double b = eval_node(*n.args[0], at);
      double e = eval_node(*n.args[1], at);
      bool integral = std::nearbyint(e) == e;
      if (b == 0.0 && e < 0.0) domain_error(n, "zero raised to a negative power");
      if (b < 0.0 && !integral) domain_error(n, "negative base with non-integer exponent");
      double r = std::pow(b, e);
      if (!std::isfinite(r)) domain_error(n, "overflow");
      return r;
    }
    case Kind::Call: {
      double a = eval_node(*n.args[0], at);
      switch (n.fn) {
        case Fn::Sin: return std::sin(a);
        case Fn::Cos: return std::cos(a);
        case Fn::Exp: {
          double r = std::exp(a);
          if (!std::isfinite(r)) domain_error(n, "overflow");
          return r;
        }
        case Fn::Log:
          if (a <= 0.0) domain_error(n, "logarithm of a non-positive value");
          return std::log(a);
        case Fn::Sqrt:
          if (a < 0.0) domain_error(n, "square root of a negative value");
          return std::sqrt(a);
        case Fn::Abs: return std::abs(a);
        case Fn::Atan: return std::atan(a);
        case Fn::Min: return std::min(a, eval_node(*n.args[1], at));
        case Fn::Max: return std::max(a, eval_node(*n.args[1], at));
      }
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Structure queries

bool depends_on(const Expr::Node& n, int slot) {
  if (n.kind == Kind::Var) return n.slot == slot;
  for (const auto& a : n.args) {
    if (depends_on(*a, slot)) return true;
  }
  return false;
}

bool depends_on_range(const Expr::Node& n, int lo, int hi) {
  if (n.kind == Kind::Var) return n.slot >= lo && n.slot < hi;
  for (const auto& a : n.args) {
    if (depends_on_range(*a, lo, hi)) return true;
  }
  return false;
}

NodePtr derivative(const NodePtr& np, int slot) {
  const Expr::Node& n = *np;
  if (!depends_on(n, slot)) return make_number(0.0);
  const bool u_slot = slot >= kSlotU1;
  switch (n.kind) {
    case Kind::Number: return make_number(0.0);
    case Kind::Var: return make_number(1.0);
    case Kind::Neg: return neg(derivative(n.args[0], slot));
    case Kind::Add: return add(derivative(n.args[0], slot), derivative(n.args[1], slot));
    case Kind::Sub: return sub(derivative(n.args[0], slot), derivative(n.args[1], slot));
    case Kind::Mul:
      return add(mul(derivative(n.args[0], slot), n.args[1]), mul(n.args[0], derivative(n.args[1], slot)));
    case Kind::Div: {
      const auto& a = n.args[0];
      const auto& b = n.args[1];
      NodePtr num = sub(mul(derivative(a, slot), b), mul(a, derivative(b, slot)));
      return div(num, pow_node(b, make_number(2.0)));
    }
    case Kind::Pow: {
      const auto& b = n.args[0];
      const auto& e = n.args[1];
      bool base_dep = depends_on(*b, slot);
      bool exp_dep = depends_on(*e, slot);
      if (base_dep && !depends_on_range(*e, 0, 1 << 20)) {
        double ev = eval_node(*e, EvalPoint{});
        if (u_slot && std::nearbyint(ev) != ev) {
          throw NonDifferentiable("cannot differentiate '" + to_string(n) +
                                  "': power of a u-dependent base needs an integer exponent");
        }
        // e * b^(e-1) * b'
        return mul(mul(make_number(ev), pow_node(b, make_number(ev - 1.0))), derivative(b, slot));
      }
      if (base_dep && u_slot) {
        throw NonDifferentiable("cannot differentiate '" + to_string(n) +
                                "': variable exponent with u-dependent base (use exp/log)");
      }
      // b^e * (e' log b + e b'/b)
      NodePtr term = mul(derivative(e, slot), make_call(Fn::Log, {b}));
      if (base_dep) term = add(term, div(mul(e, derivative(b, slot)), b));
      (void)exp_dep;
      return mul(np, term);
    }
    case Kind::Call: {
      const auto& a = n.args[0];
      if (!info(n.fn).smooth) {
        throw NonDifferentiable("cannot differentiate non-smooth node '" + to_string(n) + "'");
      }
      NodePtr da = derivative(a, slot);
      switch (n.fn) {
        case Fn::Sin: return mul(make_call(Fn::Cos, {a}), da);
        case Fn::Cos: return neg(mul(make_call(Fn::Sin, {a}), da));
        case Fn::Exp: return mul(np, da);
        case Fn::Log: return div(da, a);
        case Fn::Sqrt: return div(da, mul(make_number(2.0), np));
        case Fn::Atan:
          return div(da, add(make_number(1.0), pow_node(a, make_number(2.0))));
        default: break;
      }
    }
  }
  throw std::logic_error("unhandled node in derivative");
}

}  // namespace

Expr::Expr() : root_(make_number(0.0)), k_(0) {}

Expr::Expr(std::shared_ptr<const Node> root, int components) : root_(std::move(root)), k_(components) {}

double Expr::eval(const EvalPoint& at) const { return eval_node(*root_, at); }

double Expr::eval(Point x, std::span<const double> u) const { return eval_node(*root_, EvalPoint{x, {}, u}); }

std::string Expr::str() const { return to_string(*root_); }

bool Expr::depends_on_u() const { return depends_on_range(*root_, kSlotU1, 1 << 20); }

bool Expr::depends_on_u(std::size_t component) const {
  return depends_on(*root_, kSlotU1 + static_cast<int>(component));
}

bool Expr::depends_on_normal() const { return depends_on_range(*root_, kSlotN1, kSlotU1); }

bool Expr::is_constant() const { return !depends_on_range(*root_, 0, 1 << 20); }

Expr parse(std::string_view src, int k) {
  if (k < 1) throw InvalidParameter("parse: component count must be >= 1, got " + std::to_string(k));
  return Expr(Parser(src, ParseOptions{k, true}).parse_all(), k);
}

Expr parse_coefficient(std::string_view src) { return Expr(Parser(src, ParseOptions{0, false}).parse_all(), 0); }

Expr constant_expr(double value) { return Expr(make_number(value), 0); }

Expr diff_u(const Expr& e, std::size_t component) {
  if (static_cast<int>(component) >= e.components()) {
    throw InvalidParameter("diff_u: component " + std::to_string(component) + " out of range for k=" +
                           std::to_string(e.components()));
  }
  return Expr(derivative(e.root(), kSlotU1 + static_cast<int>(component)), e.components());
}

Expr diff_x(const Expr& e, int axis) {
  if (axis < 0 || axis > 1) throw InvalidParameter("diff_x: axis must be 0 or 1");
  return Expr(derivative(e.root(), kSlotX1 + axis), e.components());
}

}  // namespace srlab

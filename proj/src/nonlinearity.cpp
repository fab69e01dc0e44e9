#include "srlab/nonlinearity.hpp"

#include <cmath>

#include "srlab/error.hpp"

namespace srlab {

BoundaryNonlinearity::BoundaryNonlinearity(std::vector<Expr> components) : g_(std::move(components)) {
  const int k = static_cast<int>(g_.size());
  if (k < 1) throw InvalidParameter("boundary nonlinearity needs at least one component");
  for (const auto& e : g_) {
    if (e.components() != k && !(e.components() == 0 && !e.depends_on_u())) {
      throw InvalidParameter("boundary nonlinearity components must be parsed with k=" + std::to_string(k));
    }
  }
  dg_.resize(static_cast<std::size_t>(k) * k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const Expr& ga = g_[static_cast<std::size_t>(a)];
      if (!ga.depends_on_u(static_cast<std::size_t>(b))) {
        dg_[static_cast<std::size_t>(a * k + b)] = constant_expr(0.0);
        continue;
      }
      try {
        dg_[static_cast<std::size_t>(a * k + b)] = diff_u(ga, static_cast<std::size_t>(b));
      } catch (const NonDifferentiable& err) {
        differentiable_ = false;
        if (reason_.empty()) reason_ = err.what();
      }
    }
  }
}

BoundaryNonlinearity BoundaryNonlinearity::parse(const std::vector<std::string>& sources) {
  const int k = static_cast<int>(sources.size());
  if (k < 1) throw InvalidParameter("boundary nonlinearity needs at least one component");
  std::vector<Expr> comps;
  comps.reserve(sources.size());
  for (const auto& s : sources) comps.push_back(srlab::parse(s, k));
  return BoundaryNonlinearity(std::move(comps));
}

void BoundaryNonlinearity::evaluate(const EvalPoint& at, std::span<double> out) const {
  for (std::size_t a = 0; a < g_.size(); ++a) out[a] = g_[a].eval(at);
}

void BoundaryNonlinearity::jacobian(const EvalPoint& at, Eigen::Ref<Eigen::MatrixXd> out, bool allow_fd) const {
  const int k = this->k();
  std::vector<double> u(at.u.begin(), at.u.end());
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const auto& d = dg_[static_cast<std::size_t>(a * k + b)];
      if (d) {
        out(a, b) = d->eval(at);
        continue;
      }
      if (!allow_fd) throw NonDifferentiable(reason_);
      double h = 1e-6 * (1.0 + std::abs(u[b]));
      double saved = u[b];
      u[b] = saved + h;
      double fp = g_[a].eval(EvalPoint{at.x, at.normal, u});
      u[b] = saved - h;
      double fm = g_[a].eval(EvalPoint{at.x, at.normal, u});
      u[b] = saved;
      out(a, b) = (fp - fm) / (2.0 * h);
    }
  }
}

}  // namespace srlab

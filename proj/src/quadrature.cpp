#include "srlab/quadrature.hpp"

#include <cmath>

namespace srlab {

std::vector<InteriorQuadPoint> interior_quadrature(const Mesh& m) {
  constexpr double a = 2.0 / 3.0;
  constexpr double b = 1.0 / 6.0;
  constexpr std::array<std::array<double, 3>, 3> bary{{{a, b, b}, {b, a, b}, {b, b, a}}};
  std::vector<InteriorQuadPoint> pts;
  pts.reserve(3 * m.triangles().size());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles()[t];
    const Point& p0 = m.vertices()[tri[0]];
    const Point& p1 = m.vertices()[tri[1]];
    const Point& p2 = m.vertices()[tri[2]];
    double w = m.triangle_area(t) / 3.0;
    for (const auto& l : bary) {
      pts.push_back({t, {l[0] * p0.x + l[1] * p1.x + l[2] * p2.x, l[0] * p0.y + l[1] * p1.y + l[2] * p2.y}, w, l});
    }
  }
  return pts;
}

std::vector<BoundaryQuadPoint> boundary_quadrature(const Mesh& m) {
  const double off = 0.5 / std::sqrt(3.0);
  const std::array<double, 2> ts{0.5 - off, 0.5 + off};
  std::vector<BoundaryQuadPoint> pts;
  pts.reserve(2 * m.boundary_edges().size());
  for (int e = 0; e < m.num_boundary_edges(); ++e) {
    const auto& be = m.boundary_edges()[e];
    const Point& a = m.vertices()[be.v[0]];
    const Point& b = m.vertices()[be.v[1]];
    double w = 0.5 * m.edge_length(e);
    Point n = m.outward_normal(e);
    for (double t : ts) {
      pts.push_back({e, {(1 - t) * a.x + t * b.x, (1 - t) * a.y + t * b.y}, n, w, {1 - t, t}});
    }
  }
  return pts;
}

}  // namespace srlab

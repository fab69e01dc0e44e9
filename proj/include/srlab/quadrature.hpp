#pragma once

#include <array>
#include <vector>

#include "srlab/mesh.hpp"

namespace srlab {

/// Point of the 3-point degree-2 triangle rule, with P1 shape values of the
/// triangle's vertices at that point.
struct InteriorQuadPoint {
  int triangle;
  Point x;
  double weight;
  std::array<double, 3> shape;
};

/// Point of the 2-point Gauss rule on a boundary edge, with P1 shape values of
/// the edge's two vertices.
struct BoundaryQuadPoint {
  int edge;
  Point x;
  Point normal;
  double weight;
  std::array<double, 2> shape;
};

std::vector<InteriorQuadPoint> interior_quadrature(const Mesh& m);
/// Two points per boundary edge, in boundary-edge order.
std::vector<BoundaryQuadPoint> boundary_quadrature(const Mesh& m);

}  // namespace srlab

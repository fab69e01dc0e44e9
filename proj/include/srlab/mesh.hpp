#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace srlab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Boundary edge stored in the orientation of its owning (counterclockwise) triangle,
/// so the domain lies to the left of v[0] -> v[1].
struct BoundaryEdge {
  std::array<int, 2> v{};
  int marker = 1;
};

/// Conforming 2D triangulation with marked boundary edges.
///
/// The constructor validates every structural invariant (positive areas, edge
/// manifoldness, closed boundary loops, index ranges, distinct vertices) and
/// throws ValidationError otherwise. Instances are immutable.
class Mesh {
 public:
  Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
       std::vector<BoundaryEdge> boundary_edges);

  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const noexcept { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const noexcept { return boundary_edges_; }

  int num_vertices() const noexcept { return static_cast<int>(vertices_.size()); }
  int num_triangles() const noexcept { return static_cast<int>(triangles_.size()); }
  int num_boundary_edges() const noexcept { return static_cast<int>(boundary_edges_.size()); }

  double triangle_area(int t) const;
  double total_area() const;
  double boundary_length() const;
  double edge_length(int e) const;
  /// Outward unit normal of boundary edge e.
  Point outward_normal(int e) const;
  /// Number of distinct undirected edges.
  int num_edges() const;

 private:
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  int num_edges_ = 0;
};

Mesh make_unit_square(int n);
Mesh make_unit_disk(int sectors, int rings);
Mesh refine_uniform(const Mesh& m);

/// Vertices incident to boundary edges (optionally only those with `marker`), ascending.
std::vector<int> boundary_nodes(const Mesh& m, std::optional<int> marker = std::nullopt);

// Text format: "nv nt nbe", then nv "x y", nt "i j k", nbe "a b marker" lines.
// '#' starts a comment. Indices are 0-based.
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(std::ostream& out, const Mesh& m);

}  // namespace srlab

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "../support/generators.hpp"
#include "srlab/error.hpp"
#include "srlab/mesh.hpp"

using namespace srlab;

namespace {

// Undirected edge count computed from the triangles alone.
int count_edges(const Mesh& m) {
  std::set<std::pair<int, int>> e;
  for (const auto& t : m.triangles()) {
    for (int i = 0; i < 3; ++i) e.insert(std::minmax(t[i], t[(i + 1) % 3]));
  }
  return static_cast<int>(e.size());
}

double signed_area(const Mesh& m, const std::array<int, 3>& t) {
  const auto& a = m.vertices()[t[0]];
  const auto& b = m.vertices()[t[1]];
  const auto& c = m.vertices()[t[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

void expect_invariants(const Mesh& m) {
  for (const auto& t : m.triangles()) EXPECT_GT(signed_area(m, t), 0.0);
  std::map<std::pair<int, int>, int> owners;
  for (const auto& t : m.triangles()) {
    for (int i = 0; i < 3; ++i) ++owners[std::minmax(t[i], t[(i + 1) % 3])];
  }
  std::set<std::pair<int, int>> boundary;
  for (const auto& be : m.boundary_edges()) boundary.insert(std::minmax(be.v[0], be.v[1]));
  for (const auto& [e, n] : owners) {
    EXPECT_TRUE(n == 1 || n == 2);
    EXPECT_EQ(n == 1, boundary.count(e) == 1);
  }
  EXPECT_EQ(boundary.size(), m.boundary_edges().size());
  std::map<int, int> degree;
  for (const auto& be : m.boundary_edges()) {
    ++degree[be.v[0]];
    --degree[be.v[1]];
  }
  for (const auto& [v, d] : degree) EXPECT_EQ(d, 0) << "vertex " << v;
}

// Canonical form: sorted triangles of sorted coordinate triples.
std::vector<std::array<std::pair<double, double>, 3>> canonical(const Mesh& m) {
  std::vector<std::array<std::pair<double, double>, 3>> out;
  for (const auto& t : m.triangles()) {
    std::array<std::pair<double, double>, 3> c;
    for (int i = 0; i < 3; ++i) {
      const auto& p = m.vertices()[t[i]];
      c[i] = {std::round(p.x * 1e12) / 1e12, std::round(p.y * 1e12) / 1e12};
    }
    std::sort(c.begin(), c.end());
    out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(MeshSquare, CountsForSmallN) {
  Mesh m1 = make_unit_square(1);
  EXPECT_EQ(m1.num_vertices(), 4);
  EXPECT_EQ(m1.num_triangles(), 2);
  EXPECT_EQ(m1.num_boundary_edges(), 4);
  Mesh m2 = make_unit_square(2);
  EXPECT_EQ(m2.num_vertices(), 9);
  EXPECT_EQ(m2.num_triangles(), 8);
  EXPECT_EQ(m2.num_boundary_edges(), 8);
}

TEST(MeshSquare, RejectsZeroSubdivisions) { EXPECT_THROW(make_unit_square(0), InvalidParameter); }

TEST(MeshSquare, CountsAndAreaForManyN) {
  for (int n = 1; n <= 9; ++n) {
    Mesh m = make_unit_square(n);
    EXPECT_EQ(m.num_vertices(), (n + 1) * (n + 1));
    EXPECT_EQ(m.num_triangles(), 2 * n * n);
    EXPECT_EQ(m.num_boundary_edges(), 4 * n);
    for (const auto& be : m.boundary_edges()) EXPECT_EQ(be.marker, 1);
    EXPECT_NEAR(m.total_area(), 1.0, 1e-14);
    EXPECT_NEAR(m.boundary_length(), 4.0, 1e-13);
    EXPECT_EQ(m.num_vertices() - count_edges(m) + m.num_triangles(), 1);
    expect_invariants(m);
  }
}

TEST(MeshDisk, SingleFan) {
  Mesh m = make_unit_disk(8, 1);
  EXPECT_EQ(m.num_vertices(), 9);
  EXPECT_EQ(m.num_triangles(), 8);
  EXPECT_EQ(m.num_boundary_edges(), 8);
}

TEST(MeshDisk, TwoRingsMatchEuler) {
  Mesh m = make_unit_disk(8, 2);
  EXPECT_EQ(m.num_vertices(), 17);
  EXPECT_EQ(m.num_triangles(), 24);
  EXPECT_EQ(m.num_boundary_edges(), 8);
  EXPECT_EQ(m.num_vertices() - count_edges(m) + m.num_triangles(), 1);
  EXPECT_EQ(count_edges(m), m.num_edges());
}

TEST(MeshDisk, RejectsBadParameters) {
  EXPECT_THROW(make_unit_disk(2, 1), InvalidParameter);
  EXPECT_THROW(make_unit_disk(8, 0), InvalidParameter);
}

TEST(MeshDisk, InscribedPolygonArea) {
  for (int s : {3, 5, 8, 17, 64}) {
    for (int r : {1, 2, 5}) {
      Mesh m = make_unit_disk(s, r);
      EXPECT_NEAR(m.total_area(), s * std::sin(2 * std::numbers::pi / s) / 2, 1e-12);
      EXPECT_EQ(m.num_vertices(), 1 + r * s);
      EXPECT_EQ(m.num_triangles(), s * (2 * r - 1));
      expect_invariants(m);
    }
  }
}

TEST(MeshDisk, OuterNormalsPointAway) {
  Mesh m = make_unit_disk(12, 3);
  for (int e = 0; e < m.num_boundary_edges(); ++e) {
    const auto& be = m.boundary_edges()[e];
    const auto& a = m.vertices()[be.v[0]];
    const auto& b = m.vertices()[be.v[1]];
    Point n = m.outward_normal(e);
    EXPECT_NEAR(std::hypot(n.x, n.y), 1.0, 1e-14);
    EXPECT_GT(n.x * (a.x + b.x) + n.y * (a.y + b.y), 0.0);
    EXPECT_NEAR(n.x * (b.x - a.x) + n.y * (b.y - a.y), 0.0, 1e-14);
  }
}

TEST(MeshSquare, BottomEdgeNormal) {
  Mesh m = make_unit_square(3);
  for (int e = 0; e < m.num_boundary_edges(); ++e) {
    const auto& be = m.boundary_edges()[e];
    const auto& a = m.vertices()[be.v[0]];
    const auto& b = m.vertices()[be.v[1]];
    if (a.y == 0.0 && b.y == 0.0) {
      EXPECT_NEAR(m.outward_normal(e).x, 0.0, 1e-15);
      EXPECT_NEAR(m.outward_normal(e).y, -1.0, 1e-15);
    }
  }
}

TEST(MeshRefine, CountsAndArea) {
  for (const Mesh& m : {make_unit_square(3), make_unit_disk(7, 2)}) {
    Mesh f = refine_uniform(m);
    EXPECT_EQ(f.num_triangles(), 4 * m.num_triangles());
    EXPECT_EQ(f.num_boundary_edges(), 2 * m.num_boundary_edges());
    EXPECT_NEAR(f.total_area(), m.total_area(), 1e-14);
    EXPECT_NEAR(f.boundary_length(), m.boundary_length(), 1e-13);
    expect_invariants(f);
  }
}

TEST(MeshRefine, SquareOneEqualsSquareTwo) {
  EXPECT_EQ(canonical(refine_uniform(make_unit_square(1))), canonical(make_unit_square(2)));
  EXPECT_EQ(canonical(refine_uniform(refine_uniform(make_unit_square(1)))), canonical(make_unit_square(4)));
}

TEST(MeshRefine, MarkersInheritedAndMidpointsOnChords) {
  std::vector<Point> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<std::array<int, 3>> t{{0, 1, 2}, {0, 2, 3}};
  std::vector<BoundaryEdge> b{{{0, 1}, 1}, {{1, 2}, 2}, {{2, 3}, 3}, {{3, 0}, 4}};
  Mesh m(v, t, b);
  Mesh f = refine_uniform(m);
  std::map<int, int> per_marker;
  for (const auto& be : f.boundary_edges()) ++per_marker[be.marker];
  for (int mk = 1; mk <= 4; ++mk) EXPECT_EQ(per_marker[mk], 2);
  for (const auto& be : f.boundary_edges()) {
    const auto& a = f.vertices()[be.v[0]];
    const auto& c = f.vertices()[be.v[1]];
    // Every refined boundary edge lies on one side of the square.
    EXPECT_TRUE(a.x == c.x || a.y == c.y);
  }
}

TEST(MeshBoundaryNodes, Examples) {
  EXPECT_EQ(boundary_nodes(make_unit_square(1)), (std::vector<int>{0, 1, 2, 3}));
  std::vector<int> outer;
  for (int i = 9; i <= 16; ++i) outer.push_back(i);
  EXPECT_EQ(boundary_nodes(make_unit_disk(8, 2)), outer);
  EXPECT_TRUE(boundary_nodes(make_unit_disk(8, 2), 99).empty());
  EXPECT_EQ(boundary_nodes(make_unit_disk(8, 2), 1), outer);
}

TEST(MeshBoundaryNodes, SquareInteriorCount) {
  for (int n = 1; n <= 6; ++n) {
    EXPECT_EQ(static_cast<int>(boundary_nodes(make_unit_square(n)).size()), 4 * n);
  }
}

TEST(MeshValidation, RejectsClockwiseTriangle) {
  std::vector<Point> v{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(Mesh(v, {{0, 2, 1}}, {{{0, 2}}, {{2, 1}}, {{1, 0}}}), ValidationError);
}

TEST(MeshValidation, RejectsDegenerateTriangle) {
  std::vector<Point> v{{0, 0}, {1, 0}, {2, 0}};
  EXPECT_THROW(Mesh(v, {{0, 1, 2}}, {{{0, 1}}, {{1, 2}}, {{2, 0}}}), ValidationError);
}

TEST(MeshValidation, RejectsDuplicateVertices) {
  std::vector<Point> v{{0, 0}, {1, 0}, {0, 1}, {1e-13, 0}};
  EXPECT_THROW(Mesh(v, {{0, 1, 2}}, {{{0, 1}}, {{1, 2}}, {{2, 0}}}), ValidationError);
}

TEST(MeshValidation, RejectsIndexOutOfRange) {
  std::vector<Point> v{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(Mesh(v, {{0, 1, 3}}, {{{0, 1}}, {{1, 2}}, {{2, 0}}}), ValidationError);
}

TEST(MeshValidation, RejectsMissingBoundaryEdge) {
  std::vector<Point> v{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(Mesh(v, {{0, 1, 2}}, {{{0, 1}}, {{1, 2}}}), ValidationError);
}

TEST(MeshValidation, RejectsInteriorEdgeMarkedAsBoundary) {
  std::vector<Point> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<std::array<int, 3>> t{{0, 1, 2}, {0, 2, 3}};
  std::vector<BoundaryEdge> b{{{0, 1}}, {{1, 2}}, {{2, 3}}, {{3, 0}}, {{0, 2}}};
  EXPECT_THROW(Mesh(v, t, b), ValidationError);
}

TEST(MeshValidation, RejectsNonManifoldEdge) {
  std::vector<Point> v{{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {0.5, 0.5}};
  std::vector<std::array<int, 3>> t{{0, 1, 2}, {1, 0, 3}, {0, 1, 4}};
  EXPECT_THROW(Mesh(v, t, {{{1, 2}}, {{2, 0}}, {{0, 3}}, {{3, 1}}}), ValidationError);
}

TEST(MeshIo, RoundTripIsExact) {
  Mesh m = refine_uniform(make_unit_disk(9, 3));
  std::stringstream ss;
  write_mesh(ss, m);
  Mesh r = read_mesh(ss);
  ASSERT_EQ(r.num_vertices(), m.num_vertices());
  for (int i = 0; i < m.num_vertices(); ++i) {
    EXPECT_EQ(r.vertices()[i].x, m.vertices()[i].x);
    EXPECT_EQ(r.vertices()[i].y, m.vertices()[i].y);
  }
  EXPECT_EQ(r.triangles(), m.triangles());
  ASSERT_EQ(r.num_boundary_edges(), m.num_boundary_edges());
  for (int e = 0; e < m.num_boundary_edges(); ++e) {
    EXPECT_EQ(r.boundary_edges()[e].v, m.boundary_edges()[e].v);
    EXPECT_EQ(r.boundary_edges()[e].marker, m.boundary_edges()[e].marker);
  }
}

TEST(MeshIo, CommentsAndBlankLinesIgnored) {
  std::istringstream in(
      "# square\n3 1 3\n\n0 0 # origin\n1 0\n0 1\n0 1 2\n0 1 1\n1 2 1\n2 0 1\n");
  Mesh m = read_mesh(in);
  EXPECT_EQ(m.num_triangles(), 1);
  EXPECT_NEAR(m.total_area(), 0.5, 1e-15);
}

namespace {
int failing_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_mesh(in);
  } catch (const FormatError& e) {
    return e.line();
  }
  return -1;
}
}  // namespace

TEST(MeshIo, DiagnosticsCarryLineNumbers) {
  // Clockwise triangle on line 6.
  EXPECT_EQ(failing_line("3 1 3\n0 0\n1 0\n0 1\n# tri\n0 2 1\n0 2 1\n2 1 1\n1 0 1\n"), 6);
  // Malformed vertex on line 3.
  EXPECT_EQ(failing_line("3 1 3\n0 0\n1 zero\n0 1\n0 1 2\n0 1 1\n1 2 1\n2 0 1\n"), 3);
  // Duplicate vertex on line 4.
  EXPECT_EQ(failing_line("4 1 3\n0 0\n1 0\n0 0\n0 1\n0 1 3\n0 1 1\n1 3 1\n3 0 1\n"), 4);
  // Boundary edge that no triangle owns, line 8.
  EXPECT_EQ(failing_line("3 1 3\n0 0\n1 0\n0 1\n0 1 2\n0 1 1\n1 2 1\n2 2 1\n"), 8);
  // Truncated file.
  EXPECT_GT(failing_line("3 1 3\n0 0\n1 0\n"), 0);
}

TEST(MeshIo, MissingFileIsValidationError) {
  EXPECT_THROW(read_mesh_file("/nonexistent/mesh.txt"), ValidationError);
}

TEST(MeshProperty, RandomRefinementsKeepInvariants) {
  testgen::Rng rng(20261014);
  for (int trial = 0; trial < 12; ++trial) {
    Mesh m = rng.coin() ? make_unit_square(rng.integer(1, 4)) : make_unit_disk(rng.integer(3, 12), rng.integer(1, 3));
    const double area = m.total_area();
    const int levels = rng.integer(0, 2);
    for (int l = 0; l < levels; ++l) m = refine_uniform(m);
    expect_invariants(m);
    EXPECT_NEAR(m.total_area(), area, 1e-13);
    EXPECT_EQ(m.num_vertices() - count_edges(m) + m.num_triangles(), 1) << "trial " << trial;
  }
}

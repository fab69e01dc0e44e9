#include "srlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "srlab/error.hpp"

namespace srlab {

namespace {

constexpr double kDegenerateArea = 1e-14;
constexpr double kDuplicateTol = 1e-12;

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

enum class Entity { Vertex, Triangle, BoundaryEdge, None };

struct Defect {
  std::string message;
  Entity entity = Entity::None;
  int index = -1;
};

struct DirectedEdge {
  std::int64_t key;  // min * nv + max
  int tri;
  bool forward;  // stored as (min, max) in the triangle's CCW order
};

// Returns the first invariant violation, or std::nullopt. Reorients boundary
// edges to follow their owning triangle and fills num_edges when valid.
std::optional<Defect> check_mesh(const std::vector<Point>& vs, const std::vector<std::array<int, 3>>& ts,
                                 std::vector<BoundaryEdge>& bes, int& num_edges) {
  const int nv = static_cast<int>(vs.size());
  for (int i = 0; i < nv; ++i) {
    if (!std::isfinite(vs[i].x) || !std::isfinite(vs[i].y)) {
      return Defect{"non-finite vertex coordinate", Entity::Vertex, i};
    }
  }
  {
    std::vector<int> order(nv);
    for (int i = 0; i < nv; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return vs[a].x < vs[b].x; });
    for (int p = 0; p < nv; ++p) {
      for (int q = p + 1; q < nv && vs[order[q]].x - vs[order[p]].x <= kDuplicateTol; ++q) {
        if (std::abs(vs[order[q]].y - vs[order[p]].y) <= kDuplicateTol) {
          int hi = std::max(order[p], order[q]);
          return Defect{"vertex " + std::to_string(hi) + " duplicates vertex " +
                            std::to_string(std::min(order[p], order[q])),
                        Entity::Vertex, hi};
        }
      }
    }
  }

  std::vector<DirectedEdge> edges;
  edges.reserve(3 * ts.size());
  for (int t = 0; t < static_cast<int>(ts.size()); ++t) {
    const auto& tri = ts[t];
    for (int c = 0; c < 3; ++c) {
      if (tri[c] < 0 || tri[c] >= nv) {
        return Defect{"triangle vertex index " + std::to_string(tri[c]) + " out of range", Entity::Triangle, t};
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      return Defect{"triangle repeats a vertex", Entity::Triangle, t};
    }
    double area = signed_area(vs[tri[0]], vs[tri[1]], vs[tri[2]]);
    if (area < kDegenerateArea) {
      return Defect{area <= 0.0 ? "triangle is not counterclockwise (signed area " + std::to_string(area) + ")"
                                : "degenerate triangle (area below 1e-14)",
                    Entity::Triangle, t};
    }
    for (int c = 0; c < 3; ++c) {
      int a = tri[c];
      int b = tri[(c + 1) % 3];
      edges.push_back({static_cast<std::int64_t>(std::min(a, b)) * nv + std::max(a, b), t, a < b});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const DirectedEdge& l, const DirectedEdge& r) {
    return l.key != r.key ? l.key < r.key : l.tri < r.tri;
  });

  // key -> forward flag of the single owner, for edges used once.
  std::map<std::int64_t, bool> open_edges;
  num_edges = 0;
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j].key == edges[i].key) ++j;
    ++num_edges;
    std::size_t count = j - i;
    if (count > 2) {
      return Defect{"edge shared by more than two triangles", Entity::Triangle, edges[i + 2].tri};
    }
    if (count == 2 && edges[i].forward == edges[i + 1].forward) {
      return Defect{"inconsistent orientation across an interior edge", Entity::Triangle, edges[i + 1].tri};
    }
    if (count == 1) open_edges.emplace(edges[i].key, edges[i].forward);
    i = j;
  }

  std::map<std::int64_t, int> seen;
  std::vector<int> out_degree(nv, 0), in_degree(nv, 0);
  for (int e = 0; e < static_cast<int>(bes.size()); ++e) {
    auto& be = bes[e];
    int a = be.v[0];
    int b = be.v[1];
    if (a < 0 || a >= nv || b < 0 || b >= nv || a == b) {
      return Defect{"boundary edge vertex index out of range", Entity::BoundaryEdge, e};
    }
    std::int64_t key = static_cast<std::int64_t>(std::min(a, b)) * nv + std::max(a, b);
    if (!seen.emplace(key, e).second) {
      return Defect{"boundary edge listed twice", Entity::BoundaryEdge, e};
    }
    auto it = open_edges.find(key);
    if (it == open_edges.end()) {
      return Defect{"boundary edge (" + std::to_string(a) + "," + std::to_string(b) +
                        ") does not belong to exactly one triangle",
                    Entity::BoundaryEdge, e};
    }
    bool forward = it->second;
    if (forward != (a < b)) std::swap(be.v[0], be.v[1]);
    ++out_degree[be.v[0]];
    ++in_degree[be.v[1]];
  }
  if (seen.size() != open_edges.size()) {
    return Defect{std::to_string(open_edges.size() - seen.size()) +
                      " edge(s) used by one triangle are missing from the boundary edge list",
                  Entity::None, -1};
  }
  for (int v = 0; v < nv; ++v) {
    if (in_degree[v] != out_degree[v]) {
      return Defect{"boundary edges do not form closed loops at vertex " + std::to_string(v), Entity::Vertex, v};
    }
  }
  return std::nullopt;
}

}  // namespace

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
           std::vector<BoundaryEdge> boundary_edges)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), boundary_edges_(std::move(boundary_edges)) {
  if (auto defect = check_mesh(vertices_, triangles_, boundary_edges_, num_edges_)) {
    std::string where;
    switch (defect->entity) {
      case Entity::Vertex: where = "vertex " + std::to_string(defect->index) + ": "; break;
      case Entity::Triangle: where = "triangle " + std::to_string(defect->index) + ": "; break;
      case Entity::BoundaryEdge: where = "boundary edge " + std::to_string(defect->index) + ": "; break;
      case Entity::None: break;
    }
    throw ValidationError("invalid mesh: " + where + defect->message);
  }
}

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles_.at(t);
  return signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int t = 0; t < num_triangles(); ++t) a += triangle_area(t);
  return a;
}

double Mesh::edge_length(int e) const {
  const auto& be = boundary_edges_.at(e);
  const Point& a = vertices_[be.v[0]];
  const Point& b = vertices_[be.v[1]];
  return std::hypot(b.x - a.x, b.y - a.y);
}

double Mesh::boundary_length() const {
  double l = 0.0;
  for (int e = 0; e < num_boundary_edges(); ++e) l += edge_length(e);
  return l;
}

Point Mesh::outward_normal(int e) const {
  const auto& be = boundary_edges_.at(e);
  const Point& a = vertices_[be.v[0]];
  const Point& b = vertices_[be.v[1]];
  double len = std::hypot(b.x - a.x, b.y - a.y);
  // Domain on the left of a -> b, so the outward side is the right.
  return {(b.y - a.y) / len, -(b.x - a.x) / len};
}

int Mesh::num_edges() const { return num_edges_; }

Mesh make_unit_square(int n) {
  if (n < 1) throw InvalidParameter("make_unit_square: n must be >= 1, got " + std::to_string(n));
  const double h = 1.0 / n;
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<Point> vs;
  vs.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) vs.push_back({i == n ? 1.0 : i * h, j == n ? 1.0 : j * h});
  }
  std::vector<std::array<int, 3>> ts;
  ts.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      ts.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      ts.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  std::vector<BoundaryEdge> bes;
  bes.reserve(4 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) bes.push_back({{id(i, 0), id(i + 1, 0)}, 1});
  for (int j = 0; j < n; ++j) bes.push_back({{id(n, j), id(n, j + 1)}, 1});
  for (int i = n; i > 0; --i) bes.push_back({{id(i, n), id(i - 1, n)}, 1});
  for (int j = n; j > 0; --j) bes.push_back({{id(0, j), id(0, j - 1)}, 1});
  return Mesh(std::move(vs), std::move(ts), std::move(bes));
}

Mesh make_unit_disk(int sectors, int rings) {
  if (sectors < 3 || rings < 1) {
    throw InvalidParameter("make_unit_disk: need sectors >= 3 and rings >= 1, got sectors=" +
                           std::to_string(sectors) + " rings=" + std::to_string(rings));
  }
  const int s = sectors;
  auto ring_vertex = [s](int ring, int j) { return 1 + (ring - 1) * s + (j % s); };
  std::vector<Point> vs;
  vs.reserve(1 + static_cast<std::size_t>(s) * rings);
  vs.push_back({0.0, 0.0});
  for (int ring = 1; ring <= rings; ++ring) {
    double radius = static_cast<double>(ring) / rings;
    for (int j = 0; j < s; ++j) {
      double theta = 2.0 * std::numbers::pi * j / s;
      vs.push_back({radius * std::cos(theta), radius * std::sin(theta)});
    }
  }
  std::vector<std::array<int, 3>> ts;
  ts.reserve(static_cast<std::size_t>(s) * (2 * rings - 1));
  for (int j = 0; j < s; ++j) ts.push_back({0, ring_vertex(1, j), ring_vertex(1, j + 1)});
  for (int ring = 1; ring < rings; ++ring) {
    for (int j = 0; j < s; ++j) {
      int a = ring_vertex(ring, j);
      int b = ring_vertex(ring, j + 1);
      int c = ring_vertex(ring + 1, j + 1);
      int d = ring_vertex(ring + 1, j);
      ts.push_back({a, d, c});
      ts.push_back({a, c, b});
    }
  }
  std::vector<BoundaryEdge> bes;
  bes.reserve(s);
  for (int j = 0; j < s; ++j) bes.push_back({{ring_vertex(rings, j), ring_vertex(rings, j + 1)}, 1});
  return Mesh(std::move(vs), std::move(ts), std::move(bes));
}

Mesh refine_uniform(const Mesh& m) {
  const auto nv = static_cast<std::int64_t>(m.num_vertices());
  std::vector<Point> vs = m.vertices();
  std::map<std::int64_t, int> midpoint;
  auto mid = [&](int a, int b) {
    std::int64_t key = std::min<std::int64_t>(a, b) * nv + std::max(a, b);
    auto [it, inserted] = midpoint.emplace(key, static_cast<int>(vs.size()));
    if (inserted) {
      const Point& pa = m.vertices()[a];
      const Point& pb = m.vertices()[b];
      vs.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    }
    return it->second;
  };
  std::vector<std::array<int, 3>> ts;
  ts.reserve(4 * m.triangles().size());
  for (const auto& t : m.triangles()) {
    int ab = mid(t[0], t[1]);
    int bc = mid(t[1], t[2]);
    int ca = mid(t[2], t[0]);
    ts.push_back({t[0], ab, ca});
    ts.push_back({ab, t[1], bc});
    ts.push_back({ca, bc, t[2]});
    ts.push_back({ab, bc, ca});
  }
  std::vector<BoundaryEdge> bes;
  bes.reserve(2 * m.boundary_edges().size());
  for (const auto& be : m.boundary_edges()) {
    int c = mid(be.v[0], be.v[1]);
    bes.push_back({{be.v[0], c}, be.marker});
    bes.push_back({{c, be.v[1]}, be.marker});
  }
  return Mesh(std::move(vs), std::move(ts), std::move(bes));
}

std::vector<int> boundary_nodes(const Mesh& m, std::optional<int> marker) {
  std::vector<int> nodes;
  for (const auto& be : m.boundary_edges()) {
    if (marker && be.marker != *marker) continue;
    nodes.push_back(be.v[0]);
    nodes.push_back(be.v[1]);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

namespace {

// Next non-empty line with comments stripped; returns false on EOF.
bool next_data_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

template <typename... T>
void parse_fields(const std::string& line, int lineno, const char* what, T&... fields) {
  std::istringstream ss(line);
  ((ss >> fields), ...);
  if (ss.fail()) throw FormatError(std::string("expected ") + what, lineno);
  std::string rest;
  if (ss >> rest) throw FormatError(std::string("trailing characters after ") + what, lineno);
}

}  // namespace

Mesh read_mesh(std::istream& in) {
  std::string line;
  int lineno = 0;
  if (!next_data_line(in, line, lineno)) throw FormatError("missing header 'nv nt nbe'", lineno + 1);
  long nv = 0, nt = 0, nbe = 0;
  parse_fields(line, lineno, "header 'nv nt nbe'", nv, nt, nbe);
  if (nv < 3 || nt < 1 || nbe < 3) throw FormatError("header counts too small for a mesh", lineno);

  std::vector<Point> vs(nv);
  std::vector<int> vline(nv), tline(nt), eline(nbe);
  for (long i = 0; i < nv; ++i) {
    if (!next_data_line(in, line, lineno)) throw FormatError("unexpected end of file in vertex block", lineno + 1);
    parse_fields(line, lineno, "vertex 'x y'", vs[i].x, vs[i].y);
    vline[i] = lineno;
  }
  std::vector<std::array<int, 3>> ts(nt);
  for (long t = 0; t < nt; ++t) {
    if (!next_data_line(in, line, lineno)) throw FormatError("unexpected end of file in triangle block", lineno + 1);
    parse_fields(line, lineno, "triangle 'i j k'", ts[t][0], ts[t][1], ts[t][2]);
    tline[t] = lineno;
  }
  std::vector<BoundaryEdge> bes(nbe);
  for (long e = 0; e < nbe; ++e) {
    if (!next_data_line(in, line, lineno)) {
      throw FormatError("unexpected end of file in boundary edge block", lineno + 1);
    }
    parse_fields(line, lineno, "boundary edge 'a b marker'", bes[e].v[0], bes[e].v[1], bes[e].marker);
    eline[e] = lineno;
  }
  if (next_data_line(in, line, lineno)) throw FormatError("unexpected data after boundary edge block", lineno);

  int num_edges = 0;
  if (auto defect = check_mesh(vs, ts, bes, num_edges)) {
    int at = lineno;
    switch (defect->entity) {
      case Entity::Vertex: at = vline[defect->index]; break;
      case Entity::Triangle: at = tline[defect->index]; break;
      case Entity::BoundaryEdge: at = eline[defect->index]; break;
      case Entity::None: break;
    }
    throw FormatError(defect->message, at);
  }
  return Mesh(std::move(vs), std::move(ts), std::move(bes));
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& m) {
  out << "# nv nt nbe\n" << m.num_vertices() << ' ' << m.num_triangles() << ' ' << m.num_boundary_edges() << '\n';
  out << std::setprecision(17);
  for (const auto& p : m.vertices()) out << p.x << ' ' << p.y << '\n';
  for (const auto& t : m.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& be : m.boundary_edges()) out << be.v[0] << ' ' << be.v[1] << ' ' << be.marker << '\n';
}

}  // namespace srlab

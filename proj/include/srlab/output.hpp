#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "srlab/mesh.hpp"

namespace srlab {

/// CSV with header `node,x,y,u1..uk`, one row per vertex.
void write_solution_csv(std::ostream& out, const Mesh& m, const Eigen::VectorXd& U, int k);

struct SolutionTable {
  int k = 0;
  std::vector<int> node;
  std::vector<Point> x;
  Eigen::MatrixXd u;  // rows = nodes, cols = components
};

/// Throws FormatError with the offending line.
SolutionTable read_solution_csv(std::istream& in);

struct SvgOptions {
  int width = 640;
  int isolines = 12;
  std::string title;
};

/// Triangles filled by their mean nodal value plus isolines of the P1 interpolant.
void write_field_svg(std::ostream& out, const Mesh& m, std::span<const double> nodal, const SvgOptions& opts = {});

/// Boundary trace of each component against arc length, one polyline per
/// component and boundary loop.
void write_trace_svg(std::ostream& out, const Mesh& m, const Eigen::VectorXd& U, int k, const SvgOptions& opts = {});

struct SvgSummary {
  double width = 0.0;
  double height = 0.0;
  int polygons = 0;
  int polylines = 0;
  int lines = 0;
};

/// Minimal well-formedness check of the SVG subset written above: balanced
/// tags, a single <svg> root. Throws FormatError.
SvgSummary read_svg_summary(std::istream& in);

/// Boundary loops as vertex sequences following the edge orientation.
std::vector<std::vector<int>> boundary_loops(const Mesh& m);

}  // namespace srlab

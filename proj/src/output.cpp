#include "srlab/output.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <iterator>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "srlab/error.hpp"

namespace srlab {

void write_solution_csv(std::ostream& out, const Mesh& m, const Eigen::VectorXd& U, int k) {
  if (k < 1 || U.size() != static_cast<Eigen::Index>(m.num_vertices()) * k) {
    throw InvalidParameter("write_solution_csv: U does not match the mesh");
  }
  out << "node,x,y";
  for (int a = 1; a <= k; ++a) out << ",u" << a;
  out << '\n';
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (int v = 0; v < m.num_vertices(); ++v) {
    const Point& p = m.vertices()[v];
    out << v << ',' << num(p.x) << ',' << num(p.y);
    for (int a = 0; a < k; ++a) out << ',' << num(U(v * k + a));
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw FormatError("not a number: '" + s + "'", line);
  }
  if (used != s.size()) throw FormatError("not a number: '" + s + "'", line);
  return v;
}

}  // namespace

SolutionTable read_solution_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing header", 1);
  auto head = split_csv(line);
  if (head.size() < 4 || head[0] != "node" || head[1] != "x" || head[2] != "y") {
    throw FormatError("expected header node,x,y,u1..uk", 1);
  }
  SolutionTable t;
  t.k = static_cast<int>(head.size()) - 3;
  for (int a = 0; a < t.k; ++a) {
    if (head[static_cast<std::size_t>(3 + a)] != "u" + std::to_string(a + 1)) {
      throw FormatError("expected column u" + std::to_string(a + 1), 1);
    }
  }
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv(line);
    if (f.size() != head.size()) throw FormatError("expected " + std::to_string(head.size()) + " fields", lineno);
    double node = to_double(f[0], lineno);
    if (node != std::floor(node) || node < 0) throw FormatError("node must be a nonnegative integer", lineno);
    t.node.push_back(static_cast<int>(node));
    t.x.push_back({to_double(f[1], lineno), to_double(f[2], lineno)});
    std::vector<double> r;
    for (int a = 0; a < t.k; ++a) r.push_back(to_double(f[static_cast<std::size_t>(3 + a)], lineno));
    rows.push_back(std::move(r));
  }
  t.u.resize(static_cast<Eigen::Index>(rows.size()), t.k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int a = 0; a < t.k; ++a) t.u(static_cast<Eigen::Index>(i), a) = rows[i][static_cast<std::size_t>(a)];
  }
  return t;
}

std::vector<std::vector<int>> boundary_loops(const Mesh& m) {
  const auto& be = m.boundary_edges();
  std::multimap<int, int> by_start;
  for (int e = 0; e < static_cast<int>(be.size()); ++e) by_start.emplace(be[e].v[0], e);
  std::vector<bool> used(be.size(), false);
  std::vector<std::vector<int>> loops;
  for (int e0 = 0; e0 < static_cast<int>(be.size()); ++e0) {
    if (used[e0]) continue;
    std::vector<int> loop{be[e0].v[0]};
    int e = e0;
    while (true) {
      used[e] = true;
      const int end = be[e].v[1];
      if (end == loop.front()) break;
      loop.push_back(end);
      int next = -1;
      auto [lo, hi] = by_start.equal_range(end);
      for (auto it = lo; it != hi; ++it) {
        if (!used[it->second]) {
          next = it->second;
          break;
        }
      }
      if (next < 0) break;
      e = next;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  // Diverging blue - light grey - red.
  const double lo[3] = {59, 76, 192}, mid[3] = {221, 221, 221}, hi[3] = {180, 4, 38};
  double c[3];
  for (int i = 0; i < 3; ++i) {
    c[i] = t < 0.5 ? lo[i] + (mid[i] - lo[i]) * (2 * t) : mid[i] + (hi[i] - mid[i]) * (2 * t - 1);
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c[0])),
                static_cast<int>(std::lround(c[1])), static_cast<int>(std::lround(c[2])));
  return buf;
}

struct Frame {
  double x0, y0, scale, margin, height;
  double sx(double x) const { return margin + (x - x0) * scale; }
  double sy(double y) const { return height - margin - (y - y0) * scale; }
};

void svg_open(std::ostream& out, double w, double h, const std::string& title) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  if (!title.empty()) out << "<title>" << escape(title) << "</title>\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
}

}  // namespace

void write_field_svg(std::ostream& out, const Mesh& m, std::span<const double> nodal, const SvgOptions& opts) {
  if (nodal.size() != static_cast<std::size_t>(m.num_vertices())) {
    throw InvalidParameter("write_field_svg: one value per vertex required");
  }
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& p : m.vertices()) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double margin = 20.0;
  const double span = std::max(xmax - xmin, ymax - ymin);
  const double scale = (opts.width - 2 * margin) / (span > 0 ? span : 1.0);
  const double w = opts.width;
  const double h = 2 * margin + (ymax - ymin) * scale;
  Frame f{xmin, ymin, scale, margin, h};

  double vmin = *std::min_element(nodal.begin(), nodal.end());
  double vmax = *std::max_element(nodal.begin(), nodal.end());
  const double vspan = vmax - vmin;

  svg_open(out, w, h, opts.title);
  out.setf(std::ios::fixed);
  out.precision(3);
  out << "<g stroke-width=\"0.3\">\n";
  for (const auto& t : m.triangles()) {
    double mean = (nodal[t[0]] + nodal[t[1]] + nodal[t[2]]) / 3.0;
    std::string c = color(vspan > 0 ? (mean - vmin) / vspan : 0.5);
    out << "<polygon points=\"";
    for (int i = 0; i < 3; ++i) {
      const Point& p = m.vertices()[t[i]];
      out << (i ? " " : "") << f.sx(p.x) << ',' << f.sy(p.y);
    }
    out << "\" fill=\"" << c << "\" stroke=\"" << c << "\"/>\n";
  }
  out << "</g>\n";

  if (vspan > 0 && opts.isolines > 0) {
    out << "<g stroke=\"black\" stroke-width=\"0.8\" fill=\"none\">\n";
    for (int l = 0; l < opts.isolines; ++l) {
      const double level = vmin + (l + 0.5) * vspan / opts.isolines;
      for (const auto& t : m.triangles()) {
        Point pts[2];
        int np = 0;
        for (int i = 0; i < 3; ++i) {
          const int a = t[i], b = t[(i + 1) % 3];
          const double va = nodal[a], vb = nodal[b];
          if ((va < level) != (vb < level)) {
            const double s = (level - va) / (vb - va);
            const Point& pa = m.vertices()[a];
            const Point& pb = m.vertices()[b];
            if (np < 2) pts[np] = {pa.x + s * (pb.x - pa.x), pa.y + s * (pb.y - pa.y)};
            ++np;
          }
        }
        if (np == 2) {
          out << "<line x1=\"" << f.sx(pts[0].x) << "\" y1=\"" << f.sy(pts[0].y) << "\" x2=\"" << f.sx(pts[1].x)
              << "\" y2=\"" << f.sy(pts[1].y) << "\"/>\n";
        }
      }
    }
    out << "</g>\n";
  }
  out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.2\" points=\"";
  for (const auto& loop : boundary_loops(m)) {
    for (int v : loop) out << f.sx(m.vertices()[v].x) << ',' << f.sy(m.vertices()[v].y) << ' ';
    if (!loop.empty()) out << f.sx(m.vertices()[loop[0]].x) << ',' << f.sy(m.vertices()[loop[0]].y) << ' ';
  }
  out << "\"/>\n</svg>\n";
  out.unsetf(std::ios::fixed);
}

void write_trace_svg(std::ostream& out, const Mesh& m, const Eigen::VectorXd& U, int k, const SvgOptions& opts) {
  if (k < 1 || U.size() != static_cast<Eigen::Index>(m.num_vertices()) * k) {
    throw InvalidParameter("write_trace_svg: U does not match the mesh");
  }
  const auto loops = boundary_loops(m);
  struct Sample {
    double s;
    int v;
  };
  std::vector<std::vector<Sample>> paths;
  double s = 0.0;
  for (const auto& loop : loops) {
    std::vector<Sample> path;
    for (std::size_t i = 0; i <= loop.size(); ++i) {
      const int v = loop[i % loop.size()];
      if (i > 0) {
        const Point& a = m.vertices()[loop[i - 1]];
        const Point& b = m.vertices()[v];
        s += std::hypot(b.x - a.x, b.y - a.y);
      }
      path.push_back({s, v});
    }
    paths.push_back(std::move(path));
  }
  double umin = std::numeric_limits<double>::infinity(), umax = -umin;
  for (const auto& p : paths) {
    for (const auto& q : p) {
      for (int a = 0; a < k; ++a) {
        umin = std::min(umin, U(q.v * k + a));
        umax = std::max(umax, U(q.v * k + a));
      }
    }
  }
  if (!(umax > umin)) {
    umin -= 1.0;
    umax += 1.0;
  }
  const double w = opts.width, h = opts.width * 0.5, margin = 30.0;
  const double smax = s > 0 ? s : 1.0;
  auto X = [&](double v) { return margin + v / smax * (w - 2 * margin); };
  auto Y = [&](double v) { return h - margin - (v - umin) / (umax - umin) * (h - 2 * margin); };

  svg_open(out, w, h, opts.title);
  out.setf(std::ios::fixed);
  out.precision(3);
  out << "<line x1=\"" << X(0) << "\" y1=\"" << h - margin << "\" x2=\"" << X(smax) << "\" y2=\"" << h - margin
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << X(0) << "\" y1=\"" << margin << "\" x2=\"" << X(0) << "\" y2=\"" << h - margin
      << "\" stroke=\"black\"/>\n";
  if (umin < 0 && umax > 0) {
    out << "<line x1=\"" << X(0) << "\" y1=\"" << Y(0) << "\" x2=\"" << X(smax) << "\" y2=\"" << Y(0)
        << "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
  }
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  for (int a = 0; a < k; ++a) {
    for (const auto& p : paths) {
      out << "<polyline fill=\"none\" stroke=\"" << palette[a % 6] << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& q : p) out << X(q.s) << ',' << Y(U(q.v * k + a)) << ' ';
      out << "\"/>\n";
    }
  }
  out.unsetf(std::ios::fixed);
  out.precision(6);
  out << "<text x=\"" << margin << "\" y=\"" << margin - 10 << "\" font-size=\"12\">max " << umax << ", min " << umin
      << "</text>\n</svg>\n";
}

SvgSummary read_svg_summary(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  SvgSummary sum;
  std::vector<std::string> stack;
  int roots = 0;
  int line = 1;
  std::size_t i = 0;
  auto count_lines = [&](std::size_t from, std::size_t to) {
    line += static_cast<int>(std::count(text.begin() + static_cast<std::ptrdiff_t>(from),
                                        text.begin() + static_cast<std::ptrdiff_t>(to), '\n'));
  };
  while (true) {
    std::size_t lt = text.find('<', i);
    if (lt == std::string::npos) break;
    count_lines(i, lt);
    if (text.compare(lt, 4, "<!--") == 0) {
      std::size_t end = text.find("-->", lt);
      if (end == std::string::npos) throw FormatError("unterminated comment", line);
      count_lines(lt, end);
      i = end + 3;
      continue;
    }
    std::size_t gt = text.find('>', lt);
    if (gt == std::string::npos) throw FormatError("unterminated tag", line);
    std::string tag = text.substr(lt + 1, gt - lt - 1);
    count_lines(lt, gt);
    i = gt + 1;
    if (tag.empty()) throw FormatError("empty tag", line);
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      std::string name = tag.substr(1);
      while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
      if (stack.empty() || stack.back() != name) throw FormatError("mismatched closing tag </" + name + ">", line);
      stack.pop_back();
      continue;
    }
    const bool self_closing = tag.back() == '/';
    std::size_t name_end = tag.find_first_of(" \t\r\n/");
    std::string name = tag.substr(0, name_end);
    if (stack.empty()) {
      if (name != "svg" || ++roots > 1) throw FormatError("expected a single <svg> root", line);
      auto attr = [&](const std::string& key) {
        std::size_t p = tag.find(" " + key + "=\"");
        if (p == std::string::npos) return 0.0;
        p += key.size() + 3;
        return std::stod(tag.substr(p, tag.find('"', p) - p));
      };
      sum.width = attr("width");
      sum.height = attr("height");
    }
    if (name == "polygon") ++sum.polygons;
    if (name == "polyline") ++sum.polylines;
    if (name == "line") ++sum.lines;
    if (!self_closing) stack.push_back(name);
  }
  if (!stack.empty()) throw FormatError("unclosed <" + stack.back() + ">", line);
  if (roots != 1) throw FormatError("no <svg> root", line);
  return sum;
}

}  // namespace srlab

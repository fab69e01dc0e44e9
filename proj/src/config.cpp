#include "srlab/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace srlab {

using nlohmann::json;

bool OutputSpec::wants(const std::string& f) const {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

namespace {

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<int>();
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
  return v.get<bool>();
}

int positive_int(const json& v, const std::string& path, int min) {
  int x = get_int(v, path);
  if (x < min) throw ConfigError(path, "must be >= " + std::to_string(min));
  return x;
}

DomainSpec parse_domain(const json& d, const std::filesystem::path& base) {
  const std::string p = "domain";
  if (!d.is_object()) throw ConfigError(p, "expected an object");
  const json* type = find(d, "type");
  if (!type) throw ConfigError(join(p, "type"), "missing (unit-square | unit-disk | mesh-file)");
  const std::string t = get_string(*type, join(p, "type"));
  DomainSpec out;
  if (t == "unit-square") {
    only_keys(d, p, {"type", "n", "refine"});
    out.kind = DomainSpec::Kind::UnitSquare;
    if (auto* n = find(d, "n")) out.n = positive_int(*n, join(p, "n"), 1);
  } else if (t == "unit-disk") {
    only_keys(d, p, {"type", "sectors", "rings", "refine"});
    out.kind = DomainSpec::Kind::UnitDisk;
    if (auto* s = find(d, "sectors")) out.sectors = positive_int(*s, join(p, "sectors"), 3);
    if (auto* r = find(d, "rings")) out.rings = positive_int(*r, join(p, "rings"), 1);
  } else if (t == "mesh-file") {
    only_keys(d, p, {"type", "path", "refine"});
    out.kind = DomainSpec::Kind::MeshFile;
    const json* path = find(d, "path");
    if (!path) throw ConfigError(join(p, "path"), "missing");
    out.path = get_string(*path, join(p, "path"));
    if (out.path.is_relative()) out.path = base / out.path;
    if (!std::filesystem::exists(out.path)) {
      throw ConfigError(join(p, "path"), "file not found: " + out.path.string());
    }
  } else {
    throw ConfigError(join(p, "type"), "unknown domain type '" + t + "'");
  }
  if (auto* r = find(d, "refine")) out.refine = positive_int(*r, join(p, "refine"), 0);
  return out;
}

MatrixField parse_field(const json* v, const std::string& name, Support support, int k) {
  const std::string p = join("weights", name);
  if (!v) return MatrixField::zero(name, support, k);
  only_keys(*v, p, {"constant", "entries"});
  const json* c = find(*v, "constant");
  const json* e = find(*v, "entries");
  if ((c != nullptr) == (e != nullptr)) throw ConfigError(p, "give exactly one of 'constant' or 'entries'");
  try {
    if (c) {
      if (!c->is_array() || c->size() != static_cast<std::size_t>(k * k)) {
        throw ConfigError(join(p, "constant"), "expected " + std::to_string(k * k) + " numbers (row-major)");
      }
      std::vector<double> vals;
      for (std::size_t i = 0; i < c->size(); ++i) {
        vals.push_back(get_number((*c)[i], join(p, "constant") + "[" + std::to_string(i) + "]"));
      }
      return MatrixField::constant(name, support, k, vals);
    }
    if (!e->is_array() || e->size() != static_cast<std::size_t>(k)) {
      throw ConfigError(join(p, "entries"), "expected " + std::to_string(k) + " rows");
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < e->size(); ++i) {
      const std::string rp = join(p, "entries") + "[" + std::to_string(i) + "]";
      const json& row = (*e)[i];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(k)) {
        throw ConfigError(rp, "expected " + std::to_string(k) + " entries");
      }
      std::vector<std::string> r;
      for (std::size_t jj = 0; jj < row.size(); ++jj) {
        const json& x = row[jj];
        const std::string xp = rp + "[" + std::to_string(jj) + "]";
        if (x.is_number()) {
          std::ostringstream os;
          os.precision(17);
          os << x.get<double>();
          r.push_back(os.str());
        } else {
          r.push_back(get_string(x, xp));
          try {
            parse_coefficient(r.back());
          } catch (const Error& err) {
            throw ConfigError(xp, err.what());
          }
        }
      }
      rows.push_back(std::move(r));
    }
    return MatrixField::from_strings(name, support, rows);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& err) {
    throw ConfigError(p, err.what());
  }
}

CoefficientSpec parse_coefficient_spec(const json& v, const std::string& path) {
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return {os.str()};
  }
  return {get_string(v, path)};
}

CertifySpec parse_certify(const json& c) {
  const std::string p = "certify";
  only_keys(c, p, {"j", "alpha", "beta", "a", "b", "slope_scan"});
  CertifySpec out;
  if (auto* j = find(c, "j")) out.j = positive_int(*j, join(p, "j"), 1);
  if (auto* a = find(c, "alpha")) out.alpha = parse_coefficient_spec(*a, join(p, "alpha"));
  if (auto* b = find(c, "beta")) out.beta = parse_coefficient_spec(*b, join(p, "beta"));
  if (auto* a = find(c, "a")) out.a = get_number(*a, join(p, "a"));
  if (auto* b = find(c, "b")) out.b = get_number(*b, join(p, "b"));
  const bool explicit_ab = out.alpha || out.beta;
  const bool constants_ab = out.a || out.b;
  if (explicit_ab == constants_ab || (explicit_ab && !(out.alpha && out.beta)) ||
      (constants_ab && !(out.a && out.b))) {
    throw ConfigError(p, "give either both 'alpha' and 'beta' or both 'a' and 'b'");
  }
  if (auto* s = find(c, "slope_scan")) {
    const std::string sp = join(p, "slope_scan");
    only_keys(*s, sp, {"radii", "directions"});
    const json* radii = find(*s, "radii");
    if (!radii || !radii->is_array() || radii->empty()) throw ConfigError(join(sp, "radii"), "expected a nonempty array");
    for (std::size_t i = 0; i < radii->size(); ++i) {
      out.scan_radii.push_back(get_number((*radii)[i], join(sp, "radii") + "[" + std::to_string(i) + "]"));
    }
    if (auto* d = find(*s, "directions")) out.scan_directions = positive_int(*d, join(sp, "directions"), 1);
  }
  return out;
}

SolveSpec parse_solve(const json& s, int k) {
  const std::string p = "solve";
  only_keys(s, p, {"g", "j", "delta", "steps", "newton", "cap", "allow_fd"});
  SolveSpec out;
  const json* g = find(s, "g");
  if (!g || !g->is_array() || g->size() != static_cast<std::size_t>(k)) {
    throw ConfigError(join(p, "g"), "expected " + std::to_string(k) + " expression strings");
  }
  for (std::size_t i = 0; i < g->size(); ++i) {
    out.g.push_back(get_string((*g)[i], join(p, "g") + "[" + std::to_string(i) + "]"));
  }
  if (auto* j = find(s, "j")) out.j = positive_int(*j, join(p, "j"), 1);
  if (auto* d = find(s, "delta")) out.delta = get_number(*d, join(p, "delta"));
  if (out.j.has_value() == out.delta.has_value()) throw ConfigError(p, "give exactly one of 'j' or 'delta'");
  if (auto* st = find(s, "steps")) out.homotopy.steps = positive_int(*st, join(p, "steps"), 1);
  if (auto* n = find(s, "newton")) {
    const std::string np = join(p, "newton");
    only_keys(*n, np, {"tol", "maxit"});
    if (auto* t = find(*n, "tol")) {
      out.homotopy.newton.tol = get_number(*t, join(np, "tol"));
      if (!(out.homotopy.newton.tol > 0.0)) throw ConfigError(join(np, "tol"), "must be positive");
    }
    if (auto* m = find(*n, "maxit")) out.homotopy.newton.maxit = positive_int(*m, join(np, "maxit"), 1);
  }
  if (auto* c = find(s, "cap")) {
    out.homotopy.cap = get_number(*c, join(p, "cap"));
    if (!(*out.homotopy.cap > 0.0)) throw ConfigError(join(p, "cap"), "must be positive");
  }
  if (auto* f = find(s, "allow_fd")) out.homotopy.allow_fd = get_bool(*f, join(p, "allow_fd"));
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  only_keys(root, "", {"domain", "k", "weights", "eigen", "certify", "solve", "output"});

  RunConfig cfg;
  const json* d = find(root, "domain");
  if (!d) throw ConfigError("domain", "missing");
  cfg.domain = parse_domain(*d, base_dir);

  if (auto* k = find(root, "k")) cfg.k = positive_int(*k, "k", 1);

  const json empty = json::object();
  const json* w = find(root, "weights");
  if (!w) w = &empty;
  only_keys(*w, "weights", {"A", "Sigma", "M", "P"});
  cfg.A = parse_field(find(*w, "A"), "A", Support::Interior, cfg.k);
  cfg.Sigma = parse_field(find(*w, "Sigma"), "Sigma", Support::Boundary, cfg.k);
  cfg.M = parse_field(find(*w, "M"), "M", Support::Interior, cfg.k);
  cfg.P = parse_field(find(*w, "P"), "P", Support::Boundary, cfg.k);

  if (auto* e = find(root, "eigen")) {
    only_keys(*e, "eigen", {"count", "shift", "kernel_threshold"});
    if (auto* c = find(*e, "count")) cfg.eigen.count = positive_int(*c, "eigen.count", 1);
    if (auto* s = find(*e, "shift")) {
      if (!s->is_null()) {
        cfg.eigen.shift = get_number(*s, "eigen.shift");
        if (!(*cfg.eigen.shift >= 0.0)) throw ConfigError("eigen.shift", "must be >= 0");
      }
    }
    if (auto* t = find(*e, "kernel_threshold")) {
      cfg.eigen.kernel_threshold = get_number(*t, "eigen.kernel_threshold");
      if (!(cfg.eigen.kernel_threshold > 0.0)) throw ConfigError("eigen.kernel_threshold", "must be positive");
    }
  }
  if (auto* c = find(root, "certify")) cfg.certify = parse_certify(*c);
  if (auto* s = find(root, "solve")) cfg.solve = parse_solve(*s, cfg.k);

  if (auto* o = find(root, "output")) {
    only_keys(*o, "output", {"directory", "formats", "plots"});
    if (auto* dir = find(*o, "directory")) {
      cfg.output.directory = get_string(*dir, "output.directory");
      if (cfg.output.directory.is_relative()) cfg.output.directory = base_dir / cfg.output.directory;
    } else {
      cfg.output.directory = base_dir / cfg.output.directory;
    }
    if (auto* f = find(*o, "formats")) {
      if (!f->is_array()) throw ConfigError("output.formats", "expected an array");
      cfg.output.formats.clear();
      for (std::size_t i = 0; i < f->size(); ++i) {
        const std::string fp = "output.formats[" + std::to_string(i) + "]";
        std::string s = get_string((*f)[i], fp);
        if (s != "json" && s != "csv" && s != "svg" && s != "coo") {
          throw ConfigError(fp, "unknown format '" + s + "' (json | csv | svg | coo)");
        }
        cfg.output.formats.push_back(std::move(s));
      }
    }
    if (auto* pl = find(*o, "plots")) cfg.output.plots = positive_int(*pl, "output.plots", 0);
  } else {
    cfg.output.directory = base_dir / cfg.output.directory;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("<file>", "cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto base = file.parent_path();
  if (base.empty()) base = ".";
  RunConfig cfg = parse_config(ss.str(), base);
  cfg.source = file;
  return cfg;
}

Mesh build_mesh(const DomainSpec& d) {
  Mesh m = [&] {
    switch (d.kind) {
      case DomainSpec::Kind::UnitSquare: return make_unit_square(d.n);
      case DomainSpec::Kind::UnitDisk: return make_unit_disk(d.sectors, d.rings);
      case DomainSpec::Kind::MeshFile: return read_mesh_file(d.path.string());
    }
    throw ConfigError("domain.type", "unhandled");
  }();
  for (int i = 0; i < d.refine; ++i) m = refine_uniform(m);
  return m;
}

}  // namespace srlab

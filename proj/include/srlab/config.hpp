#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "srlab/error.hpp"
#include "srlab/mesh.hpp"
#include "srlab/solve.hpp"
#include "srlab/spectrum.hpp"
#include "srlab/weights.hpp"

namespace srlab {

/// Configuration error tied to a dotted key path such as "solve.newton.tol".
class ConfigError : public ValidationError {
 public:
  ConfigError(std::string key, const std::string& what)
      : ValidationError("config " + key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct DomainSpec {
  enum class Kind { UnitSquare, UnitDisk, MeshFile };
  Kind kind = Kind::UnitSquare;
  int n = 4;
  int sectors = 32;
  int rings = 8;
  std::filesystem::path path;
  int refine = 0;
};

/// A boundary coefficient given as a number or an expression in x1, x2, n1, n2.
struct CoefficientSpec {
  std::string source;
};

struct CertifySpec {
  int j = 1;
  std::optional<CoefficientSpec> alpha;
  std::optional<CoefficientSpec> beta;
  std::optional<double> a;
  std::optional<double> b;
  std::vector<double> scan_radii;
  int scan_directions = 8;
};

struct SolveSpec {
  std::vector<std::string> g;
  std::optional<int> j;
  std::optional<double> delta;
  HomotopyOptions homotopy;
};

struct OutputSpec {
  std::filesystem::path directory = "out";
  std::vector<std::string> formats{"json", "csv", "svg"};
  int plots = 4;

  bool wants(const std::string& f) const;
};

struct RunConfig {
  std::filesystem::path source;
  DomainSpec domain;
  int k = 1;
  MatrixField A = MatrixField::zero("A", Support::Interior, 1);
  MatrixField Sigma = MatrixField::zero("Sigma", Support::Boundary, 1);
  MatrixField M = MatrixField::zero("M", Support::Interior, 1);
  MatrixField P = MatrixField::zero("P", Support::Boundary, 1);
  EigenOptions eigen;
  std::optional<CertifySpec> certify;
  std::optional<SolveSpec> solve;
  OutputSpec output;
};

/// JSON with // and /* */ comments. Relative paths resolve against the file's directory.
/// Unknown keys are errors.
RunConfig load_config(const std::filesystem::path& file);
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");

Mesh build_mesh(const DomainSpec& d);

}  // namespace srlab

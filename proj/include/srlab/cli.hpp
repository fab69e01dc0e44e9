#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace srlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct Invocation {
  std::string subcommand;  // mesh | spectrum | certify | solve | validate
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out_dir;
  bool strict = false;  // validate: hypothesis failures also fail the run
};

/// Runs one subcommand. The primary JSON document goes to `out`, diagnostics to `err`.
int run(const Invocation& inv, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to run().
int main(int argc, char** argv);

}  // namespace srlab::cli

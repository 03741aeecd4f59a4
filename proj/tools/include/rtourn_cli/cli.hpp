// Command-line front-end. `run_cli` is the whole program minus argv handling,
// so tests can drive it with in-memory streams.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rtourn::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitInvalidInput = 2,
  kExitNotConverged = 3,
};

/// Relative --output paths are resolved against this directory when set.
inline constexpr const char* kOutputDirEnv = "RTOURN_OUTPUT_DIR";

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rtourn::cli

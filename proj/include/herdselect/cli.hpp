#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace herdselect {

/// Process exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs the tool on `args` (without the program name), writing human output
/// to `out` and diagnostics to `err`. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// argv adapter over std::cout / std::cerr.
int run_cli(int argc, char** argv);

/// Version string recorded in run manifests.
const char* version() noexcept;

}  // namespace herdselect

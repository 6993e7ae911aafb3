#ifndef GTSNE_CLI_HPP
#define GTSNE_CLI_HPP

#include <ostream>

namespace gtsne {

/// Exit codes of the command-line front end.
enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_runtime = 2 };

/**
 * Entry point of the `gtsne` tool: `generate`, `embed`, `evaluate` and `plot`
 * subcommands. Normal output goes to `out`, usage text and diagnostics to `err`.
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace gtsne

#endif

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace torsionlab {

/// Exit codes: 0 success, 1 a check or oracle failed, 2 usage or input error,
/// 3 the computation broke down (non-convergence).
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2, kExitNoConvergence = 3 };

/// Parses the arguments (without the program name) and runs the subcommand.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace torsionlab

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dmo::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kInfeasible = 2,
    kSolverFailure = 3,
};

/// Entry point of the `dmo` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dmo::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace srr::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kInfeasible = 2,
    kNumerical = 3,
};

/// Runs one subcommand (fit, predict, eval, gen, export, compare). `args`
/// excludes the program name. Data goes to `out` unless --out is given;
/// logs and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace srr::cli

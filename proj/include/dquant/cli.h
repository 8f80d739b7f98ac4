#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dquant {

enum ExitCode : int { exit_ok = 0, exit_expectation_failed = 1, exit_input_error = 2 };

/// Runs one command. `args` excludes the program name. Results go to `out`
/// (and to --out DIR when given); diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dquant

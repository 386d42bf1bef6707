#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hcif {

/// Exit status of the command driver.
enum ExitCode : int { exit_ok = 0, exit_error = 1, exit_distinguished = 2 };

/// Runs the `hcif` command line; argv[0] is the program name.
int run_cli(const std::vector<std::string>& argv, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace hcif

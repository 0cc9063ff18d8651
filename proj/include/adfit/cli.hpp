#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adfit {

/// Runs the command-line interface. `args` excludes the program name.
/// Exit codes: 0 success, 1 usage/IO/parse error, 2 non-convergence or a
/// failed check, 3 numerical-domain failure.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace adfit

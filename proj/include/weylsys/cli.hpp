#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace weylsys {

/// Runs the command line (arguments without the program name). Returns 0 on
/// success, 1 on input errors and 2 when a computation is refused as infeasible.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weylsys

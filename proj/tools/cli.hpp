#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spc::cli {

/// Runs the command line with `args` (program name excluded). Returns the
/// process exit code: 0 success, 1 infeasible, 2 input error, 3 numerical
/// failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spc::cli

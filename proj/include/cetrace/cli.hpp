#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cetrace {

/// Runs the ce-trace command line. `args` excludes the program name.
/// Returns 0 on success, 1 for usage errors and 2 for data errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cetrace

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pnes::cli {

/// Runs the command line `args` (without the program name). Returns the
/// process exit code: 0 success, 1 usage error, 2 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pnes::cli

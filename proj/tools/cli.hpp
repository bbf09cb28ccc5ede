#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace simmatch::cli {

// Runs the `simmatch` command line (args exclude the program name).
// Exit codes: 0 success, 1 runtime failure, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace simmatch::cli

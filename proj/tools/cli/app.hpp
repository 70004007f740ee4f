#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ksom::cli {

/// Parses `args` (without the program name) and runs the selected command.
/// Returns the process exit code.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ksom::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ptmsa {

/// Runs one command line (args excludes the program name).
/// Returns 0 on success, 1 for user errors and 2 for solver errors.
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ptmsa

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hill::cli {

/// Runs one command line (without the program name).  Results go to `out`
/// unless --output names a file; diagnostics go to `err`.
/// Returns 0 on success, 1 on a computational failure, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hill::cli

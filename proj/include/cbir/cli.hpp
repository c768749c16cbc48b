#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbir {

/// Exit codes: 0 success, 1 user error (flags, paths, bad input files),
/// 2 internal error. Diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cbir

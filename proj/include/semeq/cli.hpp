#pragma once

#include <string>
#include <vector>

namespace semeq {

/// Runs the command-line interface on the given arguments (program name
/// excluded, natural order). Returns the process exit code: 0 on success,
/// nonzero with a one-line diagnostic on stderr otherwise.
int run_cli(std::vector<std::string> args);

}  // namespace semeq

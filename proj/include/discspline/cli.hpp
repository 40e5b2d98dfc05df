#pragma once

#include <string>
#include <vector>

namespace discspline {

// Command-line driver; returns the process exit code.
// Exit codes: 0 ok, 1 check failure, 2 input error, 3 non-convergence.
int run_cli(const std::vector<std::string>& args);

}  // namespace discspline

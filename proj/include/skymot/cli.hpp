#pragma once

#include <string>
#include <vector>

namespace skymot {

// Entry point behind the command-line binary. Returns the process exit code:
// 0 success, 1 usage error, 2 data/config error.
int run_cli(const std::vector<std::string>& args);

}  // namespace skymot

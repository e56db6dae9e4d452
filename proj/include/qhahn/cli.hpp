#pragma once

#include <string>
#include <vector>

namespace qhahn::cli {

/// Entry point behind the qhahn binary. Returns the process exit code:
/// 0 success / all checks pass, 1 check failure, 2 usage or parameter error.
int run(const std::vector<std::string>& args);

}  // namespace qhahn::cli

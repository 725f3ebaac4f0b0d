#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dstbc::cli {

/// Runs the `dstbc` command line on `args` (without the program name).
/// Returns 0 on success, 1 when a check or self-test fails, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dstbc::cli

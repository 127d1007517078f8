#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lrdemp::cli {

/// Exit codes shared by every command.
enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3 };

/// Runs one command line (argv[0] included). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string tool_version();

}  // namespace lrdemp::cli

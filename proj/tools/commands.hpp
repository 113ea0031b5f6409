#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dnpgcn::cli {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kIo = 3 };

/// Runs one command line (args[0] is the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dnpgcn::cli

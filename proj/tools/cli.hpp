#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace widthlab::cli {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kNumerical = 3 };

// Runs one command line (without the program name).  Tables and figures go
// to the output directory; summaries to out, error JSON to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace widthlab::cli

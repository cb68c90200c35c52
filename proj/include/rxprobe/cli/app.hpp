#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rxprobe::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kRuntimeError = 3 };

// Runs one command line (without the program name). Results and the report go
// to `out`, progress and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rxprobe::cli

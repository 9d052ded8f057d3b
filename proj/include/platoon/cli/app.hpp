#pragma once

#include <iostream>

namespace platoon::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kRuntime = 2 };

// Parses argv and runs one subcommand (train, eval, experiment, export-plots).
// Returns 0 on success, 1 for invalid input, 2 for runtime failures.
int run(int argc, const char* const* argv, std::ostream& log = std::cerr);

}  // namespace platoon::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pchsh::cli {

enum ExitCode : int {
    kOk = 0,
    kBoundViolation = 1,
    kConfigError = 2,
    kValidationError = 3,
};

/// Entry point shared by the executable and the tests. argv[0] is the program name.
int run(int argc, char **argv, std::ostream &out, std::ostream &err);

/// Convenience wrapper for tests: args exclude the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace pchsh::cli

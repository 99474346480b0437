#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wentzell::cli {

/// Process exit codes shared by all subcommands.
enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kNumericFailure = 2,
    kTrivialOnly = 3,
    kNotConverged = 4,
    kUnstable = 5,
    kInconclusive = 6,
};

/// Entry point behind the `wentzell` executable. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace wentzell::cli

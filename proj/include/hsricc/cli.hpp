#pragma once

#include <string>
#include <vector>

namespace hsricc::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 solver failure, 2 config error, 3 verification
// FAIL (gain ratio >= 1), 4 unstable closed loop.
enum ExitCode : int {
    kOk = 0,
    kSolverFailure = 1,
    kConfigError = 2,
    kVerificationFail = 3,
    kUnstableLoop = 4,
};

// Entry point shared by the binary and the tests. argv excludes the program
// name: e.g. {"solve", "--config", "run.json", "--out", "outdir"}.
int run(const std::vector<std::string>& argv);

}  // namespace hsricc::cli

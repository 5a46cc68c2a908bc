#pragma once

namespace camcond::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInputError = 2, kInternal = 3 };

/// Entry point for the camcond tool: compile, eval, serve, inspect, preset.
int run(int argc, char** argv);

}  // namespace camcond::cli

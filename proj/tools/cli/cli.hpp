#pragma once

#include <ostream>

namespace hfsync::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kIo = 2, kInvalidData = 3 };

/// Entry point of the `hfsync` tool. Subcommands: simulate, sync, tune,
/// evaluate, eigen, portfolio, beta, mc. `--config FILE` reads flat
/// key=value defaults; explicit flags win.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hfsync::cli

#pragma once

#include <string>

#include "resd/config.hpp"

namespace resd {

// Dispatch a CLI subcommand.  Returns the process exit code: 0 success,
// 1 error, 2 success with unresolved clusters.  out_override, when
// nonempty, replaces the config's output path.
int run_command(const std::string& cmd, RunConfig rc, int threads,
                const std::string& out_override);

}  // namespace resd

#pragma once

#include <iosfwd>

namespace gridwarp {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,     // bad flags, unreadable or invalid config, mismatched inputs
    kExitPipeline = 3,  // extraction or reconstruction failed
};

// Entry point of the `gridwarp` command line tool. Subcommands: simulate,
// reconstruct, evaluate, bench.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Worker threads: hardware concurrency, capped by GRIDWARP_THREADS when set.
int thread_budget();

}  // namespace gridwarp

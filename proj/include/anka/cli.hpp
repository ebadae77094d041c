#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace anka {

/// Process exit codes of the `anka` command.
enum ExitCode : int {
    kExitOk = 0,
    kExitInvalidProgram = 1,  // parse or validation failure
    kExitUsage = 2,           // bad arguments, unreadable files, bad inputs
    kExitRuntime = 3,
};

/// Runs the command line `args` (without the program name).
auto run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int;

}  // namespace anka

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phasor::cli {

enum ExitCode : int { ok = 0, failure = 1, invalid = 2, notConverged = 3 };

/// Runs one command line (without the program name). Results go to files
/// under --out; tables meant for the terminal go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phasor::cli

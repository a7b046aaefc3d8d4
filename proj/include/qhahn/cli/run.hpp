// run.hpp — command dispatch and artifact emission
#pragma once

#include <iosfwd>
#include <string>

#include "qhahn/cli/config.hpp"

namespace qhahn::cli {

// Exit codes per the external interface contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitMathDomain = 3;
inline constexpr int kExitNonConvergence = 4;

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

// Executes the command, writing the artifact to options.output (or `out`
// when no path is set). Library errors are reported as machine-readable
// JSON on `err` and mapped to the exit codes above.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

} // namespace qhahn::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rholab::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNoResult = 1;  // exhausted, or a failed --check
inline constexpr int kExitUsage = 2;     // bad arguments or domain error

// Runs one invocation; `args` excludes the program name. Results go to `out`
// (or the --output file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Shortest decimal that parses back to the same double.
std::string format_double(double value);

}  // namespace rholab::cli

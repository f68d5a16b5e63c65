#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pbkc::cli {

/// Exit codes of run().
inline constexpr int exit_ok = 0;       ///< success / yes / equal
inline constexpr int exit_no = 1;       ///< check answered no, compare unequal
inline constexpr int exit_usage = 2;    ///< usage, parse, or validation errors
inline constexpr int exit_unknown = 3;  ///< check answered unknown

/// Runs the command line given by args (without the program name), writing
/// normal output to out and diagnostics to err. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pbkc::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nhbe::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_domain = 2;
inline constexpr int exit_check_failed = 3;

/// Runs the command line `args` (without the program name). Regular output
/// goes to out, diagnostics to err; returns the process exit status.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace nhbe::cli

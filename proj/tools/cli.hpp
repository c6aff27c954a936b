#pragma once

// Command-line front end. Kept as a library so tests can drive it without
// spawning processes.
//
// Exit codes: 0 success, 2 validation failure, 3 search budget or size
// guard, 4 simulation rejection cap, 64 usage or parse error.

#include <ostream>
#include <string>
#include <vector>

namespace unitsel::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 2;
inline constexpr int exit_budget = 3;
inline constexpr int exit_rejection = 4;
inline constexpr int exit_usage = 64;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace unitsel::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace adsem
{

// Exit codes of the command-line tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;  // invalid diagram, parse or runtime failure
inline constexpr int exit_rejected = 2; // trace Violated or NoInitialFound
inline constexpr int exit_usage = 3;    // bad flags or unreadable files

/// Runs one command; `args` excludes the program name.
int run_cli( const std::vector< std::string >& args, std::ostream& out, std::ostream& err );

} // namespace adsem

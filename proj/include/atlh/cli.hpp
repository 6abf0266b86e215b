#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace atlh::cli {

/// Exit codes of every command.
enum Exit : int { True = 0, False = 1, Failure = 2 };

/// Runs the atlh_mc command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace atlh::cli

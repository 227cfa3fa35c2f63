#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pirlab::cli {

// Exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCap = 3;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pirlab::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace terragym::cli {

// Exit codes: 0 ok, 2 usage/config error, 3 data/checkpoint error, 4 runtime fault.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitFault = 4;

// args excludes the program name. Deterministic given the full argument list.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace terragym::cli

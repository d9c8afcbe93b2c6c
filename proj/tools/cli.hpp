#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace generacci::cli {

// Exit codes: 0 success, 1 computation error, 2 bad flags.
inline constexpr int kOk = 0;
inline constexpr int kComputeError = 1;
inline constexpr int kUsageError = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace generacci::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace driftfit::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;     // runtime error, JSON on stderr
inline constexpr int kUsage = 2;       // bad flags or config
inline constexpr int kNotConverged = 3;  // only with --strict

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace driftfit::cli

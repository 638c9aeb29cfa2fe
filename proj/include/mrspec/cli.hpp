#pragma once

#include <iosfwd>

namespace mrspec::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Exit codes: 0 success, 2 input/config error, 3 numerical or model failure.
enum ExitCode : int { kSuccess = 0, kInputError = 2, kNumericalFailure = 3 };

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mrspec::cli

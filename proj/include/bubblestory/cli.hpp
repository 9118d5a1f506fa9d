#pragma once

#include <iosfwd>

namespace bubblestory::cli {

/// Exit codes: 0 success, 1 operational error (bad data, IO), 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line. Machine-readable output goes to `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bubblestory::cli

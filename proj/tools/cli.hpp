#pragma once

#include <iosfwd>

namespace acprobit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertificationFailure = 1;
inline constexpr int kExitInvalidInput = 2;

/// Parses argv, runs one subcommand and writes results to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace acprobit::cli

#pragma once

// Subcommands: build-graphs, train, extract, score, gradcheck, ablate.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <iosfwd>

namespace smile {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smile

#pragma once

#include <iosfwd>

namespace netrand::cli {

/// Exit codes: 0 success, 1 I/O or input-data failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace netrand::cli

#pragma once

#include <iosfwd>

namespace mobiq {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;

/// Entry point of the command-line tool. Diagnostics and the per-run log go
/// to `err`; `out` receives short result lines.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mobiq

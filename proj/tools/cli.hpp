#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace atlas::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name. Reports go to
/// `out`; the single-line error (if any) and logs go to `err`.
int Dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace atlas::cli

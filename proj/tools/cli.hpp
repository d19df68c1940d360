#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace xpm::cli {

inline constexpr int kOk = 0;
inline constexpr int kValidationFailure = 1;
inline constexpr int kUsageError = 2;

/// Runs one command. `args` includes the program name in front.
/// Machine-readable output goes to `out` (or the --out file), summaries to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace xpm::cli

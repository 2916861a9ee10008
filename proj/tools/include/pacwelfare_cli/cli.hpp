#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pacwelfare::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one command line (args[0] is the program name). Reports go to files
/// under --out; short summaries to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pacwelfare::cli

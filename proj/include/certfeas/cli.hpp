#pragma once
// Command-line front end. Subcommands: bounds, table, binormal, ceiling,
// simulate, moments, report.
//
// Exit codes: 0 success, 2 invalid input, 3 internal check failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace certfeas {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitCheckFailed = 3;

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* version() noexcept;

}  // namespace certfeas

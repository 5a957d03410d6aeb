#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hetprice::cli {

// Exit codes. A verdict maps to exactly one of these.
inline constexpr int kSatisfied = 0;
inline constexpr int kRefuted = 1;
inline constexpr int kUnknown = 2;
inline constexpr int kInputError = 3;

// Runs one subcommand. args excludes the program name. The JSON report (or
// error object) goes to `out` unless --out names a file; usage text goes to
// `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hetprice::cli

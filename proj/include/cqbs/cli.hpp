// Command dispatch for the cqbs tool.  Kept in the library so the command
// surface is testable in-process; the binary under tools/ is a thin main.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cqbs::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;  // bad arguments, config, or input files
inline constexpr int exit_cap = 3;         // refused: configured resource cap
inline constexpr int exit_internal = 4;    // a library postcondition failed

// Environment variable supplying the output directory when --out is absent;
// the fallback is the working directory.
inline constexpr const char* out_dir_env = "CQBS_OUT_DIR";

// Parses `args` (no program name), runs the selected subcommand, and writes
// human-readable progress to `out` and one tab-delimited
// "error\t<category>\t<reason>" line to `err` on failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cqbs::cli

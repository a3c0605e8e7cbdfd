#pragma once

// Command-line front end: argument and config-file resolution, dispatch to the
// library, and deterministic JSON output.

#include <iosfwd>
#include <string>
#include <vector>

namespace gboson::cli {

inline constexpr const char* kFormatVersion = "gboson/1";

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

/// Runs the tool with argv-style arguments (args[0] is the program name).
/// Results go to the --output file when given, otherwise to `out`; error lines go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gboson::cli

#pragma once

// Experiment driver behind the cdperc executable. Kept in the library so the
// tests can run subcommands in-process and compare their bytes.

#include <iosfwd>
#include <string>
#include <vector>

namespace cdp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

/// `args` excludes the program name. Data goes to `out` (or to --output),
/// diagnostics and machine-readable errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lines of an output file that start with "# |" hold the configuration that
/// produced it, in the --config format. Returns that text.
std::string extract_embedded_config(const std::string& csv);

}  // namespace cdp::cli

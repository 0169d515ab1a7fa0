#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mbsense::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitIo = 3;

/// Runs one command line (without the program name). Normal output goes to
/// `out`, diagnostics to `err`.
///
/// Subcommands: threshold, analytic, gen-noise, fit-noise, roc, pd-snr and
/// replay. `--config FILE` reads `key = value` lines that act as long flags
/// placed before the command-line flags, so explicit flags win.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mbsense::cli

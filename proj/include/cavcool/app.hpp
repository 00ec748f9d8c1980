#pragma once

#include <iosfwd>
#include <string>

#include "cavcool/config.hpp"

namespace cavcool {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitPartial = 4;

std::string_view version();

/// Executes a validated configuration: computes everything first, then writes
/// the mode's CSV files (and SVGs if requested) plus manifest.cfg into
/// config.output.dir, each atomically. A human-readable summary goes to
/// `out`. Returns kExitOk, or kExitPartial when some sweep cells failed.
/// Module failures propagate as exceptions (see exit_code_for).
int run(const RunConfig& config, std::ostream& out);

/// Maps an exception escaping `run` or `load_config` to the CLI exit code
/// and writes one machine-readable line
///   error: code=<n> kind=<config|numerical|internal> message="..."
/// to `err`.
int report_error(const std::exception& e, std::ostream& err);

}  // namespace cavcool

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nilflow/config.hpp"

namespace nilflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNegative = 2;

/// In-memory result of one subcommand.
struct RunReport {
  int exit_code = kExitOk;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  /// One JSON object, serialized without newlines.
  std::string summary;
};

/// Executes the subcommand; module errors propagate as exceptions.
RunReport execute(const ExperimentConfig& config);

std::string to_csv(const RunReport& report);

/// Runs and emits the results. With output_dir empty the CSV table goes to
/// out followed by the JSON summary line; otherwise <dir>/<subcommand>.csv
/// and <dir>/<subcommand>.jsonl are written and the summary is echoed to
/// out. Errors print {"status": "error", ...} on err and return 1.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Error record printed on failure, also used by the CLI for parse errors.
std::string error_json(const std::exception& e);

}  // namespace nilflow

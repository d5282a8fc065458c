#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "orlicz/config.hpp"

namespace orlicz {

enum ExitCode : int { exit_pass = 0, exit_check_failed = 1, exit_config_error = 2, exit_numeric_failure = 3 };

/// Everything an experiment produces; nothing is written until
/// write_artifacts.
struct RunArtifacts {
  int exit_code = exit_pass;
  std::string summary_json;
  /// (file name, contents), e.g. ("trace.csv", ...).
  std::vector<std::pair<std::string, std::string>> files;
};

/// Validates and runs one experiment. Errors become an error record with
/// exit code 2 (config) or 3 (numeric / domain failure).
RunArtifacts run(const ExperimentConfig& cfg);

/// {"status": "error", "error": {"kind", "field", "message"}}.
std::string error_record(const std::string& experiment, const std::string& kind, const std::string& field,
                         const std::string& message);

/// Writes summary.json and the CSV files into dir (created if needed).
void write_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& dir);

/// The test-function zoo as a JSON array.
std::string list_functions_json();

}  // namespace orlicz

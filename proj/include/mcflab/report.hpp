#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace mcflab {

struct ExperimentResult {
  /// Directory name under the output root, e.g. "mode-decay" or "mode-decay/k=2".
  std::string experiment;
  bool pass = false;
  nlohmann::json summary = nlohmann::json::object();
  std::string trajectory_csv;
  /// Optional term tables, written only when diagnostics are requested.
  nlohmann::json diagnostics;
  double wall_time = 0.0;
};

struct ReportFormats {
  bool csv = true;
  bool json = true;
};

/// Writes <output_dir>/<experiment>/{trajectory.csv, summary.json} (plus
/// diagnostics.json when present) and returns the paths written.
std::vector<std::filesystem::path> emit_report(const std::vector<ExperimentResult>& results,
                                               const std::filesystem::path& output_dir,
                                               const ReportFormats& formats = {});

/// summary merged with pass and wall_time.
nlohmann::json summary_document(const ExperimentResult& r);

}  // namespace mcflab

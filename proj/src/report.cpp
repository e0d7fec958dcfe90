#include "mcflab/report.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>

#include "mcflab/errors.hpp"

namespace mcflab {

namespace {

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportError("cannot open " + p.string() + ": " + std::strerror(errno));
  out << body;
  out.flush();
  if (!out) throw ReportError("write failed for " + p.string() + ": " + std::strerror(errno));
}

}  // namespace

nlohmann::json summary_document(const ExperimentResult& r) {
  nlohmann::json j = r.summary.is_object() ? r.summary : nlohmann::json::object();
  j["experiment"] = r.experiment;
  j["pass"] = r.pass;
  j["wall_time_s"] = r.wall_time;
  return j;
}

std::vector<std::filesystem::path> emit_report(const std::vector<ExperimentResult>& results,
                                               const std::filesystem::path& output_dir,
                                               const ReportFormats& formats) {
  if (results.empty()) throw ReportError("empty report: no experiment results to write");
  if (!formats.csv && !formats.json) throw ReportError("no report format selected");
  std::vector<std::filesystem::path> written;
  for (const auto& r : results) {
    if (r.experiment.empty()) throw ReportError("experiment result without a name");
    const std::filesystem::path dir = output_dir / r.experiment;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ReportError("cannot create " + dir.string() + ": " + ec.message());
    if (formats.csv) {
      write_file(dir / "trajectory.csv", r.trajectory_csv);
      written.push_back(dir / "trajectory.csv");
    }
    if (formats.json) {
      write_file(dir / "summary.json", summary_document(r).dump(2) + "\n");
      written.push_back(dir / "summary.json");
      if (!r.diagnostics.is_null()) {
        write_file(dir / "diagnostics.json", r.diagnostics.dump(2) + "\n");
        written.push_back(dir / "diagnostics.json");
      }
    }
  }
  return written;
}

}  // namespace mcflab

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mcflab {

/// One experiment request: a registered name, flat parameters and an output root.
struct ExperimentSpec {
  std::string name;
  std::map<std::string, std::string> parameters;
  std::filesystem::path output_dir = "out";

  bool has(const std::string& key) const { return parameters.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
};

const std::vector<std::string>& registered_experiments();

/// Parses key = value lines. Keys before the first [experiment] header are
/// defaults shared by every experiment; each [experiment] header starts a new
/// one. '#' starts a comment, strings may be quoted, lists use [a, b, c].
std::vector<ExperimentSpec> parse_config(std::istream& is);
std::vector<ExperimentSpec> load_config(const std::filesystem::path& path);

/// Expands list-valued "sweep.<key>" parameters into the cartesian product.
std::vector<ExperimentSpec> expand_sweep(const ExperimentSpec& spec);

}  // namespace mcflab

#include "mcflab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "mcflab/errors.hpp"

namespace mcflab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

/// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ArgumentError("parameter '" + key + "' is not a number: " + v);
}

std::vector<std::string> split_list(const std::string& v) {
  std::string body = trim(v);
  if (body.size() < 2 || body.front() != '[' || body.back() != ']') return {body};
  body = body.substr(1, body.size() - 2);
  std::vector<std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(unquote(item));
  }
  return out;
}

void apply(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  if (key == "name") {
    spec.name = unquote(value);
  } else if (key == "output_dir") {
    spec.output_dir = unquote(value);
  } else {
    spec.parameters[key] = value;
  }
}

}  // namespace

std::string ExperimentSpec::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = parameters.find(key);
  return it == parameters.end() ? fallback : unquote(it->second);
}

double ExperimentSpec::get_double(const std::string& key, double fallback) const {
  const auto it = parameters.find(key);
  return it == parameters.end() ? fallback : to_double(key, unquote(it->second));
}

long ExperimentSpec::get_int(const std::string& key, long fallback) const {
  const auto it = parameters.find(key);
  if (it == parameters.end()) return fallback;
  const double d = to_double(key, unquote(it->second));
  if (d != static_cast<double>(static_cast<long>(d))) {
    throw ArgumentError("parameter '" + key + "' must be an integer");
  }
  return static_cast<long>(d);
}

bool ExperimentSpec::get_bool(const std::string& key, bool fallback) const {
  const auto it = parameters.find(key);
  if (it == parameters.end()) return fallback;
  std::string v = unquote(it->second);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ArgumentError("parameter '" + key + "' is not a boolean: " + it->second);
}

std::vector<double> ExperimentSpec::get_list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = parameters.find(key);
  if (it == parameters.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(it->second)) out.push_back(to_double(key, item));
  return out;
}

const std::vector<std::string>& registered_experiments() {
  static const std::vector<std::string> names{"simulate", "mode-decay", "nonlinear-decay", "shift-scaling",
                                              "gage-hamilton"};
  return names;
}

std::vector<ExperimentSpec> parse_config(std::istream& is) {
  ExperimentSpec defaults;
  std::vector<ExperimentSpec> specs;
  ExperimentSpec* cur = &defaults;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      const std::string header = trim(line.substr(line.find_first_not_of('['),
                                                  line.find(']') - line.find_first_not_of('[')));
      if (header != "experiment") {
        throw ArgumentError("config line " + std::to_string(lineno) + ": unknown section [" + header + "]");
      }
      specs.push_back(defaults);
      cur = &specs.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ArgumentError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ArgumentError("config line " + std::to_string(lineno) + ": empty key");
    apply(*cur, key, value);
  }
  if (specs.empty() && !defaults.name.empty()) specs.push_back(defaults);
  for (const auto& s : specs) {
    const auto& names = registered_experiments();
    if (std::find(names.begin(), names.end(), s.name) == names.end()) {
      throw ArgumentError("unknown experiment name '" + s.name + "'");
    }
  }
  return specs;
}

std::vector<ExperimentSpec> load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file " + path.string());
  return parse_config(in);
}

std::vector<ExperimentSpec> expand_sweep(const ExperimentSpec& spec) {
  std::vector<ExperimentSpec> out{spec};
  for (auto& s : out) {
    for (auto it = s.parameters.begin(); it != s.parameters.end();) {
      it = it->first.rfind("sweep.", 0) == 0 ? s.parameters.erase(it) : std::next(it);
    }
  }
  for (const auto& [key, value] : spec.parameters) {
    if (key.rfind("sweep.", 0) != 0) continue;
    const std::string target = key.substr(6);
    std::vector<ExperimentSpec> next;
    for (const auto& base : out) {
      for (const auto& v : split_list(value)) {
        ExperimentSpec s = base;
        s.parameters[target] = v;
        const std::string prev = s.get_string("sweep_tag", "");
        s.parameters["sweep_tag"] = (prev.empty() ? "" : prev + "_") + target + "=" + v;
        next.push_back(std::move(s));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace mcflab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mcflab/config.hpp"
#include "mcflab/errors.hpp"
#include "mcflab/experiments.hpp"
#include "mcflab/report.hpp"

using namespace mcflab;
namespace fs = std::filesystem;

namespace {

ExperimentSpec spec_of(const std::string& name, std::map<std::string, std::string> params = {}) {
  ExperimentSpec s;
  s.name = name;
  s.parameters = std::move(params);
  return s;
}

fs::path scratch_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("mcflab_test_" + tag);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FTSnapshot snap(double t, double dev) {
  FTSnapshot s;
  s.t = t;
  s.dev.length_dev = s.dev.normal_dev = s.dev.curvature_dev = s.dev.curvature_grad_dev = dev;
  return s;
}

}  // namespace

TEST_CASE("config parsing with defaults, comments, quotes and lists") {
  std::istringstream in(R"(# shared
N = 128
output_dir = "results dir"

[experiment]
name = mode-decay
modes = [0, 2]   # inline comment
label = 'md'

[experiment]
name = nonlinear-decay
N = 256
)");
  const auto specs = parse_config(in);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].name == "mode-decay");
  CHECK(specs[0].output_dir == fs::path("results dir"));
  CHECK(specs[0].get_int("N", 0) == 128);
  CHECK(specs[0].get_list("modes", {}) == std::vector<double>{0.0, 2.0});
  CHECK(specs[0].get_string("label", "") == "md");
  CHECK(specs[1].get_int("N", 0) == 256);
  CHECK(specs[1].get_double("missing", 0.25) == 0.25);
}

TEST_CASE("config errors are argument errors") {
  std::istringstream unknown("[experiment]\nname = frobnicate\n");
  CHECK_THROWS_AS(parse_config(unknown), ArgumentError);
  std::istringstream section("[bogus]\n");
  CHECK_THROWS_AS(parse_config(section), ArgumentError);
  std::istringstream noeq("[experiment]\nname mode-decay\n");
  CHECK_THROWS_AS(parse_config(noeq), ArgumentError);
  const auto s = spec_of("mode-decay", {{"N", "abc"}, {"flag", "maybe"}, {"k", "2.5"}});
  CHECK_THROWS_AS(s.get_double("N", 0), ArgumentError);
  CHECK_THROWS_AS(s.get_bool("flag", false), ArgumentError);
  CHECK_THROWS_AS(s.get_int("k", 0), ArgumentError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.toml"), ArgumentError);
  CHECK_THROWS_AS(run_experiment(spec_of("frobnicate")), ArgumentError);
}

TEST_CASE("sweep expansion takes the cartesian product") {
  const auto s = spec_of("simulate", {{"sweep.N", "[64, 128]"}, {"sweep.amplitude", "[1e-3, 2e-3, 4e-3]"}, {"r0", "2"}});
  const auto out = expand_sweep(s);
  REQUIRE(out.size() == 6);
  for (const auto& e : out) {
    CHECK_FALSE(e.has("sweep.N"));
    CHECK(e.get_double("r0", 0) == 2.0);
    CHECK(e.has("N"));
    CHECK(e.has("amplitude"));
    CHECK_FALSE(e.get_string("sweep_tag", "").empty());
  }
  CHECK(out[0].get_string("sweep_tag", "") != out[1].get_string("sweep_tag", ""));
  CHECK(expand_sweep(spec_of("simulate")).size() == 1);
}

TEST_CASE("fit_line recovers an exact line") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(1.5 - 2.0 * v);
  const auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(f.points == 5);
  CHECK(f.ci_low <= f.slope);
  CHECK(f.ci_high >= f.slope);

  std::vector<double> noisy{1.0, 0.1, 1.2, -0.2, 0.9};
  const auto g = fit_line(x, noisy);
  CHECK(g.ci_low < g.slope);
  CHECK(g.ci_high > g.slope);
  CHECK_THROWS_AS(fit_line({0, 1}, {0, 1}), ArgumentError);
}

TEST_CASE("linear mode exponents") {
  CHECK(linear_mode_exponent(0, true, 4, 6) == 5.0);
  CHECK(linear_mode_exponent(1, true, 4, 6) == 5.0);
  CHECK(linear_mode_exponent(2, true, 4, 6) == 5.0);
  CHECK(linear_mode_exponent(3, true, 4, 6) == 15.0);
  CHECK(linear_mode_exponent(2, false, 4, 6) == 5.0);
  CHECK(linear_mode_exponent(0, false, 4, 6) == -3.0);
  CHECK(linear_mode_exponent(1, false, 4, 6) == -1.0);
}

TEST_CASE("onset_time is the start of the final run below the threshold") {
  FTResult r;
  for (auto [t, d] : std::vector<std::pair<double, double>>{{0.0, 0.6}, {0.1, 0.3}, {0.2, 0.45}, {0.3, 0.15}, {0.4, 0.05}}) {
    r.snapshots.push_back(snap(t, d));
  }
  CHECK(onset_time(r, 0.5) == 0.1);
  CHECK(onset_time(r, 0.2) == 0.3);
  CHECK(onset_time(r, 0.1) == 0.4);
  CHECK(onset_time(r, 0.01) == -1.0);
  CHECK(onset_time(r, 1.0) == 0.0);
}

TEST_CASE("emit_report errors and layout") {
  CHECK_THROWS_AS(emit_report({}, scratch_dir("empty")), ReportError);

  ExperimentResult r;
  r.experiment = "mode-decay/shifts_on_k2";
  r.pass = true;
  r.summary = {{"k", 2}, {"fitted_alpha", 5.0}};
  r.trajectory_csv = "t,E\n0,1\n";
  r.wall_time = 0.5;

  const fs::path both = scratch_dir("both");
  const auto written = emit_report({r}, both);
  CHECK(written.size() == 2);
  CHECK(fs::exists(both / "mode-decay/shifts_on_k2/trajectory.csv"));
  CHECK(fs::exists(both / "mode-decay/shifts_on_k2/summary.json"));
  const auto j = nlohmann::json::parse(slurp(both / "mode-decay/shifts_on_k2/summary.json"));
  CHECK(j["pass"] == true);
  CHECK(j["k"] == 2);
  CHECK(j.contains("wall_time_s"));
  CHECK(slurp(both / "mode-decay/shifts_on_k2/trajectory.csv") == r.trajectory_csv);

  const fs::path csv_only = scratch_dir("csv");
  emit_report({r}, csv_only, {true, false});
  CHECK(fs::exists(csv_only / "mode-decay/shifts_on_k2/trajectory.csv"));
  CHECK_FALSE(fs::exists(csv_only / "mode-decay/shifts_on_k2/summary.json"));

  CHECK_THROWS_AS(emit_report({r}, scratch_dir("none"), {false, false}), ReportError);

  // A regular file where a directory is needed.
  const fs::path blocked = scratch_dir("blocked");
  fs::create_directories(blocked);
  std::ofstream(blocked / "mode-decay") << "x";
  CHECK_THROWS_AS(emit_report({r}, blocked), ReportError);
  fs::remove_all(both);
  fs::remove_all(csv_only);
  fs::remove_all(blocked);
}

TEST_CASE("mode-decay k = 2 summary and determinism") {
  const auto spec = spec_of("mode-decay", {{"modes", "[2]"}, {"N", "64"}});
  const auto a = run_experiment(spec);
  REQUIRE(a.size() == 1);
  CHECK(a[0].experiment == "mode-decay/shifts_on_k2");
  CHECK(a[0].pass);
  CHECK(a[0].summary["k"] == 2);
  CHECK(a[0].summary["fitted_alpha"].get<double>() == doctest::Approx(5.0).epsilon(0.02));
  CHECK(a[0].summary["fit"]["points"].get<int>() >= 20);
  const auto b = run_experiment(spec);
  CHECK(a[0].trajectory_csv == b[0].trajectory_csv);

  // The worker pool gives the same bytes as the sequential run.
  const auto pooled = run_experiments({spec, spec_of("mode-decay", {{"modes", "[3]"}, {"N", "64"}})}, 2);
  REQUIRE(pooled.size() == 2);
  CHECK(pooled[0][0].trajectory_csv == a[0].trajectory_csv);
  CHECK(pooled[1][0].summary["fitted_alpha"].get<double>() == doctest::Approx(15.0).epsilon(0.02));
}

TEST_CASE("mode-decay without shifts grows in the unstable modes") {
  const auto res = exp_mode_decay(spec_of("mode-decay", {{"modes", "[0, 1]"}, {"N", "64"}, {"shifts", "false"}}));
  REQUIRE(res.size() == 2);
  CHECK(res[0].fit->slope == doctest::Approx(-3.0).epsilon(0.05));
  CHECK(res[1].fit->slope == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(res[0].pass);
  CHECK(res[1].pass);
}

TEST_CASE("nonlinear-decay edge cases") {
  const auto zero = exp_nonlinear_decay(spec_of("nonlinear-decay", {{"amplitude", "0"}, {"N", "64"}}));
  CHECK(zero.pass);
  for (const auto& row : zero.rows) CHECK(row.E <= 1e-12);

  const auto big = exp_nonlinear_decay(spec_of("nonlinear-decay", {{"amplitude", "0.3"}, {"N", "64"}}));
  CHECK(big.status == RunStatus::regime_exit);
  CHECK_FALSE(big.pass);
}

TEST_CASE("shift-scaling on a short delta grid") {
  const auto rep = exp_shift_scaling(spec_of("shift-scaling", {{"deltas", "[1e-4, 1e-3, 1e-2]"}}));
  CHECK(rep.zero_delta_ok);
  REQUIRE(rep.dilated.fit);
  REQUIRE(rep.translated.fit);
  CHECK(rep.dilated.fit->slope == doctest::Approx(0.5).epsilon(0.1));
  CHECK(rep.translated.fit->slope == doctest::Approx(0.5).epsilon(0.1));
  for (const auto& row : rep.dilated.rows) CHECK(row.measured == doctest::Approx(row.oracle).epsilon(0.1));
  CHECK_THROWS_AS(exp_shift_scaling(spec_of("shift-scaling", {{"deltas", "[0.5]"}})), ArgumentError);
}

TEST_CASE("gage-hamilton on a circle and a 3:1 ellipse") {
  const auto circ = exp_gage_hamilton(spec_of("gage-hamilton", {{"aspect", "1"}, {"N", "256"}, {"snapshots", "40"}}));
  for (double t0 : circ.onsets) CHECK(t0 == 0.0);
  CHECK(circ.extinction_rel_err <= 0.02);

  const auto e3 = exp_gage_hamilton(spec_of("gage-hamilton", {{"aspect", "3"}, {"N", "256"}, {"snapshots", "60"}}));
  REQUIRE(e3.onsets.size() == 3);
  CHECK(e3.onsets[2] > e3.onsets[0]);
  CHECK(e3.onsets[1] >= e3.onsets[0]);
  CHECK(e3.onsets[2] >= e3.onsets[1]);
  CHECK(e3.onsets_monotone);
  CHECK(e3.extinction_rel_err <= 0.02);
}

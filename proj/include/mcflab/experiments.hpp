#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcflab/config.hpp"
#include "mcflab/front_tracking.hpp"
#include "mcflab/graph_flow.hpp"
#include "mcflab/report.hpp"
#include "mcflab/shift_dynamics.hpp"

namespace mcflab {

/// Least-squares line y = intercept + slope * x with a 95% interval on the slope.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t points = 0;
};

/// Requires at least 3 points.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Exponent of E ~ r_T^alpha for a single Fourier mode of the linearized flow.
/// k = 0 and k = 1 depend on the shift gains; k >= 2 is shift independent.
double linear_mode_exponent(int k, bool shifts, double c_T, double c_z);

struct DecayRow {
  double t = 0.0;
  double r_T = 0.0;
  double E = 0.0;
  double bound = 0.0;  // E0 (r_T / r0)^alpha
};

struct DecayReport {
  std::string label;
  int mode = -1;  // -1 for multimode data
  bool shifts = true;
  double r0 = 1.0;
  double alpha = 0.0;      // exponent used for the bound column
  double slack = 0.0;      // bound holds if E <= (1 + slack) * bound
  double tolerance = 0.0;  // relative tolerance on the fitted exponent, 0 if unused
  std::vector<DecayRow> rows;
  std::optional<LineFit> fit;  // log E against log r_T on [0.2 r0, 0.8 r0]
  RunStatus status = RunStatus::reached_r_stop;
  std::string message;
  bool bound_holds = false;
  std::optional<ShiftBoundsResult> shift_bounds;
  bool pass = false;
  std::string csv;
  nlohmann::json term_table;  // filled when diagnostics are requested
};

std::vector<DecayReport> exp_mode_decay(const ExperimentSpec& spec, bool diagnostics = false);
DecayReport exp_nonlinear_decay(const ExperimentSpec& spec, bool diagnostics = false);
DecayReport exp_simulate(const ExperimentSpec& spec, bool diagnostics = false);

struct ScalingRow {
  double delta = 0.0;
  double measured = 0.0;  // |T - id|_inf / T_ext or |z|_inf / r0
  double oracle = 0.0;    // closed form for the same quantity
  double horizon = 0.0;
  ShiftStatus status = ShiftStatus::reached_horizon;
  ShiftBoundsResult bounds;
};

struct ScalingFamily {
  std::string name;  // "dilated" or "translated"
  std::vector<ScalingRow> rows;
  std::optional<LineFit> fit;  // log measured against log delta
  bool pass = false;
};

struct ShiftScalingReport {
  ScalingFamily dilated;
  ScalingFamily translated;
  double slope_target = 0.5;
  double slope_tolerance = 0.05;
  bool zero_delta_ok = true;  // delta = 0 keeps the shifts at zero
  bool pass = false;
  std::string csv;
};

ShiftScalingReport exp_shift_scaling(const ExperimentSpec& spec);

struct GageHamiltonReport {
  FTResult run;
  double initial_area = 0.0;
  double extinction_estimate = 0.0;  // A0 / (2 pi)
  double extinction_fit = 0.0;       // zero of the fitted A(t)
  double extinction_rel_err = 0.0;
  double extinction_tolerance = 0.02;
  std::vector<double> thresholds;
  std::vector<double> onsets;  // -1 where never reached
  bool onsets_monotone = false;
  bool deviations_monotone = false;  // over the final third of the run
  bool pass = false;
  std::string csv;
};

GageHamiltonReport exp_gage_hamilton(const ExperimentSpec& spec);

/// Earliest snapshot time from which every later snapshot has all four circle
/// deviations at most delta; -1 if that never happens.
double onset_time(const FTResult& run, double delta);

/// Runs one spec (sweep parameters already expanded) and packages its results.
std::vector<ExperimentResult> run_experiment(const ExperimentSpec& spec, bool diagnostics = false);

/// Runs specs concurrently on up to `workers` threads (0 picks the hardware
/// count). Entry i holds the results of specs[i].
std::vector<std::vector<ExperimentResult>> run_experiments(const std::vector<ExperimentSpec>& specs, unsigned workers = 0,
                                              bool diagnostics = false);

nlohmann::json to_json(const DecayReport& r);
nlohmann::json to_json(const ShiftScalingReport& r);
nlohmann::json to_json(const GageHamiltonReport& r);
nlohmann::json to_json(const LineFit& f);

}  // namespace mcflab

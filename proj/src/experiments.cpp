#include "mcflab/experiments.hpp"

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_fit.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "mcflab/errors.hpp"
#include "mcflab/relative_energy.hpp"

namespace mcflab {

namespace {

constexpr double kPi = std::numbers::pi;

struct GraphParams {
  double r0 = 1.0;
  SolverConfig cfg;
};

GraphParams graph_params(const ExperimentSpec& spec, FlowMode mode, double r_stop_default) {
  GraphParams p;
  p.r0 = spec.get_double("r0", 1.0);
  if (!(p.r0 > 0.0)) throw ArgumentError("r0 must be positive");
  SolverConfig& c = p.cfg;
  c.mode = mode;
  if (spec.has("mode")) {
    const std::string m = spec.get_string("mode", "");
    if (m != "nonlinear" && m != "linearized") throw ArgumentError("mode must be 'linearized' or 'nonlinear'");
    c.mode = m == "nonlinear" ? FlowMode::nonlinear : FlowMode::linearized;
  }
  c.N = static_cast<std::size_t>(spec.get_int("N", 512));
  c.profiles.c_zeta = spec.get_double("c_zeta", 4.0);
  c.c_T = spec.get_double("c_T", 4.0);
  c.c_z = spec.get_double("c_z", 6.0);
  c.shift_enabled = spec.get_bool("shifts", true);
  c.dt_scale = spec.get_double("dt_scale", c.dt_scale);
  c.cfl = spec.get_double("cfl", c.cfl);
  c.snapshot_ratio = spec.get_double("snapshot_ratio", c.snapshot_ratio);
  c.r_stop = spec.get_double("r_stop", r_stop_default) * p.r0;
  c.exact_energy = spec.get_bool("exact_energy", c.mode == FlowMode::nonlinear);
  return p;
}

FlowState initial_state(const GraphParams& p, HeightField h) {
  FlowState s;
  s.h = std::move(h);
  s.circle = ShrinkingCircle::from_initial_radius(p.r0);
  return s;
}

/// amp * sum of cos(k phi + 0.7 k) over the listed modes; amp is per mode.
HeightField multimode(std::size_t N, const std::vector<int>& modes, double amp) {
  return HeightField::from_function(N, [&](double phi) {
    double v = 0.0;
    for (int k : modes) v += std::cos(k * phi + 0.7 * k);
    return amp * v;
  });
}

std::vector<int> int_list(const ExperimentSpec& spec, const std::string& key, std::vector<int> fallback) {
  if (!spec.has(key)) return fallback;
  std::vector<int> out;
  for (double d : spec.get_list(key, {})) {
    if (d != std::floor(d) || d < 0.0) throw ArgumentError("'" + key + "' must hold non-negative integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

nlohmann::json term_table(const Trajectory& traj) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : traj.snapshots) {
    if (s.state.h.size() == 0) continue;
    const StabilityRhs rhs = stability_rhs(s.state.h, s.r_T, s.rates.zdot, s.rates.tdot);
    nlohmann::json terms = nlohmann::json::object();
    for (const auto& [name, v] : rhs.terms) terms[name] = v;
    rows.push_back({{"t", s.t}, {"r_T", s.r_T}, {"R_lot", rhs.R_lot}, {"R_lot_frozen", rhs.R_lot_frozen},
                    {"terms", terms}});
  }
  return rows;
}

std::string decay_csv(const Trajectory& traj, const std::vector<DecayRow>& rows) {
  std::ostringstream os;
  os << "t,r_T,z_x,z_y,T_dil,E_int,E_bulk,E,bound";
  for (int k = 0; k <= 8; ++k) os << ",amp_" << k;
  os << ",dissipation\n" << std::setprecision(17);
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto& s = traj.snapshots[i];
    const auto& d = s.diag;
    os << s.t << ',' << s.r_T << ',' << s.state.shift.z.x << ',' << s.state.shift.z.y << ','
       << s.state.shift.time_dilation << ',' << d.e_int << ',' << d.e_bulk << ',' << d.e_total << ','
       << rows[i].bound;
    for (std::size_t k = 0; k <= 8; ++k) {
      os << ',' << (k < d.modes.a.size() ? std::hypot(d.modes.a[k], d.modes.b[k]) : 0.0);
    }
    os << ',' << d.dissipation << '\n';
  }
  return os.str();
}

/// Shared core: run, tabulate E against the bound and fit the exponent.
DecayReport decay_run(const GraphParams& p, const HeightField& h0, double alpha, double slack, bool diagnostics) {
  DecayReport rep;
  rep.r0 = p.r0;
  rep.alpha = alpha;
  rep.slack = slack;
  rep.shifts = p.cfg.shift_enabled;
  const Trajectory traj = run(initial_state(p, h0), p.cfg);
  rep.status = traj.status;
  rep.message = traj.message;
  const double E0 = traj.snapshots.front().diag.e_total;
  // Energies are resolved to rounding relative to the interface length; below
  // this they are numerically zero.
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * 2.0 * kPi * p.r0;
  rep.bound_holds = true;
  std::vector<double> lr, lE;
  for (const auto& s : traj.snapshots) {
    DecayRow row{s.t, s.r_T, s.diag.e_total, E0 * std::pow(s.r_T / p.r0, alpha)};
    if (!(row.E <= (1.0 + slack) * row.bound + floor)) rep.bound_holds = false;
    rep.rows.push_back(row);
    if (s.r_T <= 0.8 * p.r0 && s.r_T >= 0.2 * p.r0 && row.E > floor) {
      lr.push_back(std::log(s.r_T));
      lE.push_back(std::log(row.E));
    }
  }
  if (lr.size() >= 20) rep.fit = fit_line(lr, lE);
  rep.csv = decay_csv(traj, rep.rows);
  if (diagnostics) rep.term_table = term_table(traj);

  // The shift trajectory the run produced, for the a priori bounds.
  ShiftTrajectory st;
  for (const auto& s : traj.snapshots) {
    st.samples.push_back({s.t, s.state.shift.z, s.state.shift.time_dilation, s.r_T, s.rates});
  }
  rep.shift_bounds = shift_bounds_check(st, p.r0, 0.5 * p.r0 * p.r0, E0);
  return rep;
}

}  // namespace

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw ArgumentError("fit_line needs at least 3 paired points");
  double c0 = 0.0, c1 = 0.0, cov00 = 0.0, cov01 = 0.0, cov11 = 0.0, sumsq = 0.0;
  gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
  LineFit f;
  f.slope = c1;
  f.intercept = c0;
  f.points = x.size();
  // gsl_fit_linear scales the covariance by the residual variance.
  f.slope_stderr = std::sqrt(cov11);
  const double tq = gsl_cdf_tdist_Pinv(0.975, static_cast<double>(x.size() - 2));
  f.ci_low = c1 - tq * f.slope_stderr;
  f.ci_high = c1 + tq * f.slope_stderr;
  return f;
}

double linear_mode_exponent(int k, bool shifts, double c_T, double c_z) {
  if (k < 0) throw ArgumentError("mode index must be non-negative");
  if (k == 0) return shifts ? 2.0 * c_T - 3.0 : -3.0;
  if (k == 1) return shifts ? c_z - 1.0 : -1.0;
  const double kk = static_cast<double>(k) * k;
  return 2.0 * (kk - 1.0) - 1.0;
}

std::vector<DecayReport> exp_mode_decay(const ExperimentSpec& spec, bool diagnostics) {
  const GraphParams p = graph_params(spec, FlowMode::linearized, 0.05);
  const std::vector<int> modes = int_list(spec, "modes", {0, 1, 2, 3});
  const double amp = spec.get_double("amplitude", 1e-4) * p.r0;
  const double tol = spec.get_double("tolerance", p.cfg.shift_enabled ? 0.02 : 0.05);
  std::vector<DecayReport> out;
  for (int k : modes) {
    if (2 * static_cast<std::size_t>(k) + 2 > p.cfg.N) throw ArgumentError("mode above the resolved range");
    const HeightField h0 = multimode(p.cfg.N, {k}, amp);
    const double target = linear_mode_exponent(k, p.cfg.shift_enabled, p.cfg.c_T, p.cfg.c_z);
    DecayReport rep = decay_run(p, h0, target, 0.0, diagnostics);
    rep.mode = k;
    rep.tolerance = tol;
    rep.label = std::string(p.cfg.shift_enabled ? "shifts_on" : "shifts_off") + "_k" + std::to_string(k);
    rep.pass = rep.status == RunStatus::reached_r_stop && rep.fit &&
               std::abs(rep.fit->slope - target) <= tol * std::abs(target);
    out.push_back(std::move(rep));
  }
  return out;
}

DecayReport exp_nonlinear_decay(const ExperimentSpec& spec, bool diagnostics) {
  const GraphParams p = graph_params(spec, FlowMode::nonlinear, 0.1);
  const int kmax = static_cast<int>(spec.get_int("max_mode", 4));
  std::vector<int> modes;
  for (int k = 0; k <= kmax; ++k) modes.push_back(k);
  modes = int_list(spec, "modes", modes);
  const double amp = spec.get_double("amplitude", 0.02) * p.r0;
  const double alpha = spec.get_double("alpha", 4.5);
  const double slack = spec.get_double("slack", 0.05);
  DecayReport rep = decay_run(p, multimode(p.cfg.N, modes, amp), alpha, slack, diagnostics);
  rep.label = "nonlinear";
  rep.pass = rep.status == RunStatus::reached_r_stop && rep.bound_holds;
  return rep;
}

DecayReport exp_simulate(const ExperimentSpec& spec, bool diagnostics) {
  const GraphParams p = graph_params(spec, FlowMode::linearized, 0.05);
  const std::vector<int> modes = int_list(spec, "modes", {2});
  const double amp = spec.get_double("amplitude", 1e-3) * p.r0;
  DecayReport rep = decay_run(p, multimode(p.cfg.N, modes, amp), spec.get_double("alpha", 4.5),
                              spec.get_double("slack", 0.05), diagnostics);
  rep.label = "simulate";
  rep.pass = rep.status == RunStatus::reached_r_stop;
  return rep;
}

ShiftScalingReport exp_shift_scaling(const ExperimentSpec& spec) {
  const double r0 = spec.get_double("r0", 1.0);
  const std::vector<double> deltas = spec.get_list("deltas", {1e-5, 1e-4, 1e-3, 1e-2});
  for (double d : deltas) {
    if (!(d > 0.0) || d > 1e-2) throw ArgumentError("shift-scaling deltas must lie in (0, 1e-2]");
  }
  const std::size_t n_weak = static_cast<std::size_t>(spec.get_int("weak_N", 512));
  IntegrateOptions io;
  io.law = ShiftLaw::graph_heights;
  io.rhs.rays = static_cast<std::size_t>(spec.get_int("rays", 32));
  io.rhs.c_T = spec.get_double("c_T", 4.0);
  io.rhs.c_z = spec.get_double("c_z", 6.0);
  io.cap_k = static_cast<int>(spec.get_int("cap_k", 16));
  io.dt = spec.get_double("dt", 1e-3);
  io.profiles.c_zeta = spec.get_double("c_zeta", 4.0);

  ShiftScalingReport rep;
  rep.slope_target = spec.get_double("slope_target", 0.5);
  rep.slope_tolerance = spec.get_double("slope_tolerance", 0.05);
  const ShrinkingCircle sc = ShrinkingCircle::from_initial_radius(r0);
  const double T_ext = sc.extinction_time;

  // Weak circle of initial radius rw about c, sampled with a vertex on every ray.
  auto weak_circle = [&](double rw, Point2 c) -> WeakTrajectory {
    const ShrinkingCircle w = ShrinkingCircle::from_initial_radius(rw, c);
    return [w, n_weak](double t) { return sample_circle(w.center, radius_at(w, t), n_weak); };
  };
  auto E0_of = [&](const WeakTrajectory& weak) {
    const ShiftedInterface si{sc, {}};
    const ClosedCurve c = weak(0.0);
    return e_int(c, si, io.profiles) + e_bulk(c, si, io.profiles);
  };

  rep.dilated.name = "dilated";
  rep.translated.name = "translated";
  for (double d : deltas) {
    const double sd = std::sqrt(d);
    {
      const WeakTrajectory weak = weak_circle((1.0 + sd) * r0, {});
      const ShiftTrajectory st = integrate_shifts(weak, sc, io);
      ScalingRow row{d, st.max_abs_dilation() / T_ext, 2.0 * sd + d, st.horizon, st.status, {}};
      row.bounds = shift_bounds_check(st, r0, T_ext, E0_of(weak));
      rep.dilated.rows.push_back(row);
    }
    {
      const WeakTrajectory weak = weak_circle(r0, {sd * r0, 0.0});
      const ShiftTrajectory st = integrate_shifts(weak, sc, io);
      ScalingRow row{d, st.max_abs_z() / r0, sd, st.horizon, st.status, {}};
      row.bounds = shift_bounds_check(st, r0, T_ext, E0_of(weak));
      rep.translated.rows.push_back(row);
    }
  }
  {
    const ShiftTrajectory st = integrate_shifts(weak_circle(r0, {}), sc, io);
    rep.zero_delta_ok = st.max_abs_z() <= 1e-12 * r0 && st.max_abs_dilation() <= 1e-12 * T_ext;
  }

  for (ScalingFamily* fam : {&rep.dilated, &rep.translated}) {
    std::vector<double> x, y;
    for (const auto& row : fam->rows) {
      if (row.measured > 0.0) {
        x.push_back(std::log(row.delta));
        y.push_back(std::log(row.measured));
      }
    }
    if (x.size() >= 3) fam->fit = fit_line(x, y);
    fam->pass = fam->fit && std::abs(fam->fit->slope - rep.slope_target) <= rep.slope_tolerance;
  }
  rep.pass = rep.dilated.pass && rep.translated.pass && rep.zero_delta_ok;

  std::ostringstream os;
  os << "family,delta,measured,oracle,horizon,status,bound,bound_pass\n" << std::setprecision(17);
  for (const ScalingFamily* fam : {&rep.dilated, &rep.translated}) {
    for (const auto& row : fam->rows) {
      os << fam->name << ',' << row.delta << ',' << row.measured << ',' << row.oracle << ',' << row.horizon << ','
         << to_string(row.status) << ',' << row.bounds.bound << ',' << (row.bounds.pass ? 1 : 0) << '\n';
    }
  }
  rep.csv = os.str();
  return rep;
}

double onset_time(const FTResult& run, double delta) {
  double onset = -1.0;
  for (auto it = run.snapshots.rbegin(); it != run.snapshots.rend(); ++it) {
    if (it->dev.max() > delta) break;
    onset = it->t;
  }
  return onset;
}

GageHamiltonReport exp_gage_hamilton(const ExperimentSpec& spec) {
  const double aspect = spec.get_double("aspect", 2.0);
  const double area = spec.get_double("area", kPi);
  if (!(aspect >= 1.0) || !(area > 0.0)) throw ArgumentError("gage-hamilton needs aspect >= 1 and area > 0");
  const double a = std::sqrt(area * aspect / kPi);
  const double b = a / aspect;
  FTConfig cfg;
  cfg.N = static_cast<std::size_t>(spec.get_int("N", 512));
  cfg.cfl = spec.get_double("cfl", cfg.cfl);
  cfg.resample_every = static_cast<std::size_t>(spec.get_int("resample_every", 200));
  cfg.snapshots = static_cast<std::size_t>(spec.get_int("snapshots", 120));
  cfg.stop_area = spec.get_double("stop_area_fraction", 0.02) * area;

  GageHamiltonReport rep;
  rep.extinction_tolerance = spec.get_double("extinction_tolerance", 0.02);
  rep.thresholds = spec.get_list("thresholds", {0.5, 0.2, 0.1});
  MarkerCurve init;
  init.curve = sample_ellipse({}, a, b, std::max<std::size_t>(4 * cfg.N, 1024));
  rep.run = run_ft(init, cfg);
  rep.initial_area = rep.run.snapshots.front().area;
  rep.extinction_estimate = rep.run.extinction_estimate;

  std::vector<double> ts, as;
  for (const auto& s : rep.run.snapshots) {
    ts.push_back(s.t);
    as.push_back(s.area);
  }
  const LineFit af = fit_line(ts, as);
  rep.extinction_fit = -af.intercept / af.slope;
  rep.extinction_rel_err = std::abs(rep.extinction_fit - rep.extinction_estimate) / rep.extinction_estimate;

  rep.onsets_monotone = true;
  std::vector<double> sorted = rep.thresholds;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prev = -1.0;
  for (double d : rep.thresholds) rep.onsets.push_back(onset_time(rep.run, d));
  for (double d : sorted) {
    const double o = onset_time(rep.run, d);
    if (o < 0.0 || o < prev) rep.onsets_monotone = false;
    prev = o;
  }

  // Sup-deviations never increase over the final third of the run, up to the
  // same 1e-6 slack used for the isoperimetric deficit.
  constexpr double kSlack = 1e-6;
  rep.deviations_monotone = true;
  const double t_last = rep.run.snapshots.back().t;
  const FTSnapshot* last = nullptr;
  for (const auto& s : rep.run.snapshots) {
    if (s.t < 2.0 * t_last / 3.0) continue;
    if (last) {
      if (s.dev.length_dev > last->dev.length_dev + kSlack || s.dev.normal_dev > last->dev.normal_dev + kSlack ||
          s.dev.curvature_dev > last->dev.curvature_dev + kSlack ||
          s.dev.curvature_grad_dev > last->dev.curvature_grad_dev + kSlack) {
        rep.deviations_monotone = false;
      }
    }
    last = &s;
  }
  rep.pass = rep.extinction_rel_err <= rep.extinction_tolerance && rep.onsets_monotone && rep.deviations_monotone;

  std::ostringstream os;
  os << "index,t,area,length,r_ref,length_dev,normal_dev,curvature_dev,curvature_grad_dev,convex\n"
     << std::setprecision(17);
  for (std::size_t i = 0; i < rep.run.snapshots.size(); ++i) {
    const auto& s = rep.run.snapshots[i];
    os << i << ',' << s.t << ',' << s.area << ',' << s.length << ',' << s.r_ref << ',' << s.dev.length_dev << ','
       << s.dev.normal_dev << ',' << s.dev.curvature_dev << ',' << s.dev.curvature_grad_dev << ','
       << (s.convex ? 1 : 0) << '\n';
  }
  rep.csv = os.str();
  return rep;
}

nlohmann::json to_json(const LineFit& f) {
  return {{"slope", f.slope},     {"intercept", f.intercept}, {"slope_stderr", f.slope_stderr},
          {"ci95_low", f.ci_low}, {"ci95_high", f.ci_high},   {"points", f.points}};
}

nlohmann::json to_json(const DecayReport& r) {
  nlohmann::json j;
  j["label"] = r.label;
  if (r.mode >= 0) j["k"] = r.mode;
  j["shifts"] = r.shifts;
  j["r0"] = r.r0;
  j["alpha"] = r.alpha;
  j["slack"] = r.slack;
  if (r.tolerance > 0.0) j["tolerance"] = r.tolerance;
  j["status"] = to_string(r.status);
  if (!r.message.empty()) j["message"] = r.message;
  j["snapshots"] = r.rows.size();
  j["bound_holds"] = r.bound_holds;
  if (r.fit) {
    j["fitted_alpha"] = r.fit->slope;
    j["fit"] = to_json(*r.fit);
  } else {
    j["fitted_alpha"] = nullptr;
  }
  if (!r.rows.empty()) {
    j["E0"] = r.rows.front().E;
    j["r_final"] = r.rows.back().r_T;
    double worst = 0.0;
    for (const auto& row : r.rows) {
      if (row.bound > 0.0) worst = std::max(worst, row.E / row.bound);
    }
    j["max_E_over_bound"] = worst;
  }
  if (r.shift_bounds) {
    const auto& b = *r.shift_bounds;
    j["shift_bounds"] = {{"pass", b.pass},       {"bound", b.bound},       {"z_ratio", b.z_ratio},
                         {"T_ratio", b.T_ratio}, {"z_margin", b.z_margin}, {"T_margin", b.T_margin}};
  }
  return j;
}

nlohmann::json to_json(const ShiftScalingReport& r) {
  nlohmann::json j;
  j["slope_target"] = r.slope_target;
  j["slope_tolerance"] = r.slope_tolerance;
  j["zero_delta_ok"] = r.zero_delta_ok;
  for (const ScalingFamily* fam : {&r.dilated, &r.translated}) {
    nlohmann::json f;
    f["pass"] = fam->pass;
    f["fitted_slope"] = fam->fit ? nlohmann::json(fam->fit->slope) : nlohmann::json(nullptr);
    if (fam->fit) f["fit"] = to_json(*fam->fit);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : fam->rows) {
      rows.push_back({{"delta", row.delta},
                      {"measured", row.measured},
                      {"oracle", row.oracle},
                      {"horizon", row.horizon},
                      {"status", to_string(row.status)},
                      {"shift_bound", row.bounds.bound},
                      {"shift_bound_pass", row.bounds.pass}});
    }
    f["rows"] = rows;
    j[fam->name] = f;
  }
  return j;
}

nlohmann::json to_json(const GageHamiltonReport& r) {
  nlohmann::json j;
  j["initial_area"] = r.initial_area;
  j["extinction_estimate"] = r.extinction_estimate;
  j["extinction_fit"] = r.extinction_fit;
  j["extinction_rel_err"] = r.extinction_rel_err;
  j["extinction_tolerance"] = r.extinction_tolerance;
  j["convexity_onset"] = r.run.convexity_onset;
  j["steps"] = r.run.steps;
  nlohmann::json on = nlohmann::json::array();
  for (std::size_t i = 0; i < r.thresholds.size(); ++i) on.push_back({{"delta", r.thresholds[i]}, {"t0", r.onsets[i]}});
  j["onsets"] = on;
  j["onsets_monotone"] = r.onsets_monotone;
  j["deviations_monotone_final_third"] = r.deviations_monotone;
  return j;
}

std::vector<ExperimentResult> run_experiment(const ExperimentSpec& spec, bool diagnostics) {
  std::string base = spec.get_string("label", spec.name);
  const std::string tag = spec.get_string("sweep_tag", "");
  if (!tag.empty()) base += "/" + tag;
  std::vector<ExperimentResult> out;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  auto from_decay = [&](const DecayReport& d, const std::string& name) {
    ExperimentResult r;
    r.experiment = name;
    r.pass = d.pass;
    r.summary = to_json(d);
    r.trajectory_csv = d.csv;
    if (diagnostics) r.diagnostics = d.term_table;
    return r;
  };
  try {
    if (spec.name == "mode-decay") {
      for (const auto& d : exp_mode_decay(spec, diagnostics)) out.push_back(from_decay(d, base + "/" + d.label));
    } else if (spec.name == "nonlinear-decay") {
      DecayReport d = exp_nonlinear_decay(spec, diagnostics);
      ExperimentResult r = from_decay(d, base);
      r.summary["criteria"] = {{"decay_bound", d.pass},
                               {"shift_bounds", d.shift_bounds ? d.shift_bounds->pass : false}};
      out.push_back(std::move(r));
    } else if (spec.name == "simulate") {
      out.push_back(from_decay(exp_simulate(spec, diagnostics), base));
    } else if (spec.name == "shift-scaling") {
      const ShiftScalingReport s = exp_shift_scaling(spec);
      out.push_back({base, s.pass, to_json(s), s.csv, {}, 0.0});
    } else if (spec.name == "gage-hamilton") {
      const GageHamiltonReport g = exp_gage_hamilton(spec);
      out.push_back({base, g.pass, to_json(g), g.csv, {}, 0.0});
    } else {
      throw ArgumentError("unknown experiment name '" + spec.name + "'");
    }
  } catch (const ArgumentError&) {
    throw;
  } catch (const Error& e) {
    ExperimentResult r;
    r.experiment = base;
    r.pass = false;
    r.summary = {{"error", e.what()}};
    out.push_back(std::move(r));
  }
  const double wall = elapsed();
  for (auto& r : out) {
    r.wall_time = wall;
    r.summary["parameters"] = spec.parameters;
  }
  return out;
}

std::vector<std::vector<ExperimentResult>> run_experiments(const std::vector<ExperimentSpec>& specs,
                                                           unsigned workers, bool diagnostics) {
  std::vector<std::vector<ExperimentResult>> results(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(specs.size(), 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        results[i] = run_experiment(specs[i], diagnostics);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace mcflab

#include "mcflab/graph_flow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "mcflab/errors.hpp"
#include "mcflab/spectral.hpp"

namespace mcflab {

namespace {

double radius_of(const ShrinkingCircle& c, double t, double dil) { return radius_at(c, t + dil); }

ShiftRates rates_for(const HeightField& h, double r, const SolverConfig& cfg) {
  if (!cfg.shift_enabled) return {};
  return shift_rhs(h, r, cfg.c_T, cfg.c_z);
}

/// Everything except the stiff part (d^2/dphi^2 + 1) h / r^2.
std::vector<double> remainder(const HeightField& h, double r, const ShiftRates& s, const SolverConfig& cfg) {
  const std::size_t n = h.size();
  std::vector<double> out(n);
  if (cfg.mode == FlowMode::linearized) {
    for (std::size_t j = 0; j < n; ++j) {
      const double phi = HeightField::angle(j, n);
      out[j] = -s.tdot / r - dot(circle_normal(phi), s.zdot);
    }
    return out;
  }
  PeriodicFFT& fft = thread_fft(n);
  const auto d1 = fft.derivative(h.values, 1);
  const auto d2 = fft.derivative(h.values, 2);
  // Polar radius rho = r - h about the moving center, fixed angle.
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = HeightField::angle(j, n);
    const Point2 e = unit_from_angle(phi);
    const Point2 ephi = rotate_ccw(e);
    const double rho = r - h[j];
    if (rho <= 1e-12 * r) throw RegimeError("nonlinear flow: graph touches the circle center");
    const double rp = -d1[j];
    const double rpp = -d2[j];
    const double g2 = rho * rho + rp * rp;
    const double H = (rho * rho + 2.0 * rp * rp - rho * rpp) / (g2 * std::sqrt(g2));
    const double rho_t = (dot(s.zdot, rp * ephi - rho * e) - H * std::sqrt(g2)) / rho;
    const double full = -(1.0 + s.tdot) / r - rho_t;
    out[j] = full - (d2[j] + h[j]) / (r * r);
  }
  return out;
}

/// Multiply mode k by exp((1 - k^2) I).
std::vector<double> propagate(std::span<const double> v, double I) {
  PeriodicFFT& fft = thread_fft(v.size());
  return fft.apply_multiplier(v, [I](int k) { return std::exp((1.0 - double(k) * double(k)) * I); });
}

/// Integral of 1/r_T^2 between two radii when T' = 1 + tdot is held fixed.
double factor_integral(double r_from, double r_to, double tdot) {
  return -std::log((r_to * r_to) / (r_from * r_from)) / (2.0 * (1.0 + tdot));
}

void check_regime(const FlowState& s) {
  const auto rs = graph_regime(s);
  if (!rs.ok) {
    throw RegimeError("graph regime violated: max|h|/r_T = " + std::to_string(rs.h_ratio) +
                      ", max|h'| = " + std::to_string(rs.hp_max));
  }
}

}  // namespace

RegimeStatus graph_regime(const FlowState& state) {
  const double r = state.radius();
  const std::size_t n = state.h.size();
  const auto d1 = thread_fft(n).derivative(state.h.values, 1);
  RegimeStatus rs;
  rs.h_ratio = state.h.max_abs() / r;
  for (double v : d1) rs.hp_max = std::max(rs.hp_max, std::abs(v) / r);
  rs.ok = rs.h_ratio < 0.5 && rs.hp_max < 1.0;
  return rs;
}

ShiftRates shift_rhs(const HeightField& h, double r_T, double c_T, double c_z) {
  if (!(r_T > 0.0)) throw ArgumentError("shift_rhs needs r_T > 0");
  const std::size_t n = h.size();
  double mean = 0.0;
  Point2 mean_n;
  for (std::size_t j = 0; j < n; ++j) {
    mean += h[j];
    mean_n += h[j] * circle_normal(HeightField::angle(j, n));
  }
  mean /= static_cast<double>(n);
  mean_n = mean_n / static_cast<double>(n);
  return {(c_z / (r_T * r_T)) * mean_n, (c_T / r_T) * mean};
}

std::vector<double> linearized_rhs(const FlowState& state, const SolverConfig& cfg) {
  check_regime(state);
  const double r = state.radius();
  SolverConfig lin = cfg;
  lin.mode = FlowMode::linearized;
  auto out = remainder(state.h, r, rates_for(state.h, r, cfg), lin);
  const auto d2 = thread_fft(state.h.size()).derivative(state.h.values, 2);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += (d2[j] + state.h[j]) / (r * r);
  return out;
}

std::vector<double> nonlinear_rhs(const FlowState& state, const SolverConfig& cfg) {
  check_regime(state);
  const double r = state.radius();
  SolverConfig nl = cfg;
  nl.mode = FlowMode::nonlinear;
  auto out = remainder(state.h, r, rates_for(state.h, r, cfg), nl);
  const auto d2 = thread_fft(state.h.size()).derivative(state.h.values, 2);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += (d2[j] + state.h[j]) / (r * r);
  return out;
}

FlowState step(const FlowState& state, double dt, const SolverConfig& cfg) {
  if (!(dt > 0.0)) throw ArgumentError("step needs dt > 0");
  check_regime(state);
  const ShrinkingCircle& sc = state.circle;
  const double t0 = state.shift.t;
  const double r0 = state.radius();
  const double dt_max = cfg.cfl * r0 * r0;
  if (dt > dt_max) throw StepRejectedError("step: dt exceeds cfl * r_T^2", dt_max);
  // With |tdot| <= 1/2 the shifted time advances at most 1.5 dt.
  if (t0 + state.shift.time_dilation + 1.5 * dt >= sc.extinction_time) {
    throw StepRejectedError("step: dt reaches past extinction", dt_max);
  }

  const std::size_t n = state.h.size();
  const ShiftRates s0 = rates_for(state.h, r0, cfg);
  const auto n0 = remainder(state.h, r0, s0, cfg);

  const double th = t0 + 0.5 * dt;
  const double dil_h = state.shift.time_dilation + 0.5 * dt * s0.tdot;
  const double r_h = radius_of(sc, th, dil_h);
  std::vector<double> pre(n);
  for (std::size_t j = 0; j < n; ++j) pre[j] = state.h[j] + 0.5 * dt * n0[j];
  HeightField h_half(propagate(pre, factor_integral(r0, r_h, s0.tdot)));

  const ShiftRates sh = rates_for(h_half, r_h, cfg);
  const auto nh = remainder(h_half, r_h, sh, cfg);

  FlowState out;
  out.circle = sc;
  out.shift.t = t0 + dt;
  out.shift.time_dilation = state.shift.time_dilation + dt * sh.tdot;
  out.shift.z = state.shift.z + dt * sh.zdot;
  const double r1 = radius_of(sc, out.shift.t, out.shift.time_dilation);
  const auto a = propagate(state.h.values, factor_integral(r0, r1, sh.tdot));
  const auto b = propagate(nh, factor_integral(r_h, r1, sh.tdot));
  std::vector<double> h1(n);
  for (std::size_t j = 0; j < n; ++j) h1[j] = a[j] + dt * b[j];
  out.h = HeightField(std::move(h1));
  return out;
}

Snapshot make_snapshot(const FlowState& state, const SolverConfig& cfg) {
  Snapshot snap;
  snap.t = state.shift.t;
  snap.r_T = state.radius();
  snap.state = state;
  snap.rates = rates_for(state.h, snap.r_T, cfg);
  BreakdownOptions bo;
  bo.exact = cfg.exact_energy;
  snap.diag = energy_breakdown(state.h, state.interface(), cfg.profiles, bo);
  return snap;
}

Trajectory run(const FlowState& initial, const SolverConfig& cfg) {
  if (!(cfg.r_stop > 0.0)) throw ArgumentError("run: r_stop must be positive");
  if (!(cfg.dt_scale > 0.0) || cfg.dt_scale > cfg.cfl) throw ArgumentError("run: need 0 < dt_scale <= cfl");
  Trajectory traj;
  FlowState state = initial;
  if (!graph_regime(state).ok) {
    Snapshot s;
    s.t = state.shift.t;
    s.r_T = state.radius();
    s.state = state;
    traj.snapshots.push_back(s);
    traj.status = RunStatus::regime_exit;
    traj.message = "initial data outside the graph regime";
    return traj;
  }
  traj.snapshots.push_back(make_snapshot(state, cfg));
  double next_snap = state.radius() * cfg.snapshot_ratio;
  while (traj.steps < cfg.max_steps) {
    const double r = state.radius();
    if (r <= cfg.r_stop) {
      traj.status = RunStatus::reached_r_stop;
      if (traj.snapshots.back().t != state.shift.t) traj.snapshots.push_back(make_snapshot(state, cfg));
      return traj;
    }
    double dt = cfg.dt_scale * r * r;
    try {
      state = step(state, dt, cfg);
    } catch (const StepRejectedError& e) {
      dt = 0.5 * e.suggested_dt();
      state = step(state, dt, cfg);
    } catch (const RegimeError& e) {
      traj.status = RunStatus::regime_exit;
      traj.message = e.what();
      return traj;
    }
    ++traj.steps;
    const bool in_regime = graph_regime(state).ok;
    const double r1 = state.radius();
    if (!in_regime || r1 <= next_snap || r1 <= cfg.r_stop) {
      traj.snapshots.push_back(make_snapshot(state, cfg));
      while (next_snap >= r1) next_snap *= cfg.snapshot_ratio;
    }
    if (!in_regime) {
      traj.status = RunStatus::regime_exit;
      traj.message = "graph regime left at t = " + std::to_string(state.shift.t);
      return traj;
    }
  }
  traj.status = RunStatus::regime_exit;
  traj.message = "step budget exhausted";
  return traj;
}

std::string to_string(RunStatus s) { return s == RunStatus::reached_r_stop ? "reached_r_stop" : "regime_exit"; }
std::string to_string(FlowMode m) { return m == FlowMode::linearized ? "linearized" : "nonlinear"; }

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "t,r_T,z_x,z_y,T_dil,E_int,E_bulk,E";
  for (int k = 0; k <= 8; ++k) os << ",amp_" << k;
  os << ",dissipation\n";
  os << std::setprecision(17);
  for (const auto& s : traj.snapshots) {
    const auto& d = s.diag;
    os << s.t << ',' << s.r_T << ',' << s.state.shift.z.x << ',' << s.state.shift.z.y << ','
       << s.state.shift.time_dilation << ',' << d.e_int << ',' << d.e_bulk << ',' << d.e_total;
    for (std::size_t k = 0; k <= 8; ++k) {
      double amp = 0.0;
      if (k < d.modes.a.size()) amp = std::hypot(d.modes.a[k], d.modes.b[k]);
      os << ',' << amp;
    }
    os << ',' << d.dissipation << '\n';
  }
}

nlohmann::json trajectory_metadata(const Trajectory& traj, const SolverConfig& cfg) {
  nlohmann::json j;
  j["status"] = to_string(traj.status);
  j["message"] = traj.message;
  j["steps"] = traj.steps;
  j["snapshots"] = traj.snapshots.size();
  j["config"] = {{"N", cfg.N},         {"mode", to_string(cfg.mode)}, {"cfl", cfg.cfl},
                 {"dt_scale", cfg.dt_scale}, {"r_stop", cfg.r_stop},   {"shift_enabled", cfg.shift_enabled},
                 {"c_T", cfg.c_T},     {"c_z", cfg.c_z},             {"c_zeta", cfg.profiles.c_zeta},
                 {"exact_energy", cfg.exact_energy}};
  if (!traj.snapshots.empty()) {
    j["t_final"] = traj.snapshots.back().t;
    j["r_final"] = traj.snapshots.back().r_T;
  }
  return j;
}

}  // namespace mcflab

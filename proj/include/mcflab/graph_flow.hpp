#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcflab/calibration.hpp"
#include "mcflab/height_field.hpp"
#include "mcflab/relative_energy.hpp"
#include "mcflab/strong_solution.hpp"

namespace mcflab {

enum class FlowMode { linearized, nonlinear };

struct FlowState {
  HeightField h;
  ShiftState shift;
  ShrinkingCircle circle;

  ShiftedInterface interface() const { return {circle, shift}; }
  double radius() const { return interface().radius(); }
};

struct RegimeStatus {
  bool ok = true;
  double h_ratio = 0.0;  // max|h| / r_T, gate 1/2
  double hp_max = 0.0;   // max|h'| in arc length, gate 1
};

RegimeStatus graph_regime(const FlowState& state);

struct SolverConfig {
  std::size_t N = 512;
  FlowMode mode = FlowMode::linearized;
  /// Steps with dt > cfl * r_T^2 are rejected.
  double cfl = 0.2;
  /// run() steps with dt = dt_scale * r_T^2 (must not exceed cfl).
  double dt_scale = 0.005;
  double r_stop = 0.05;
  bool shift_enabled = true;
  double c_T = 4.0;
  double c_z = 6.0;
  /// A snapshot is taken whenever r_T has shrunk by this factor.
  double snapshot_ratio = 0.98;
  /// Evaluate the polygon energies at snapshots (otherwise the spectral forms).
  bool exact_energy = false;
  std::size_t max_steps = 10'000'000;
  CutoffProfiles profiles;
};

struct ShiftRates {
  Point2 zdot;
  double tdot = 0.0;
};

ShiftRates shift_rhs(const HeightField& h, double r_T, double c_T, double c_z);

std::vector<double> linearized_rhs(const FlowState& state, const SolverConfig& cfg);
std::vector<double> nonlinear_rhs(const FlowState& state, const SolverConfig& cfg);

FlowState step(const FlowState& state, double dt, const SolverConfig& cfg);

enum class RunStatus { reached_r_stop, regime_exit };

struct Snapshot {
  double t = 0.0;
  double r_T = 0.0;
  FlowState state;
  ShiftRates rates;
  EnergyBreakdown diag;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  RunStatus status = RunStatus::reached_r_stop;
  std::string message;
  std::size_t steps = 0;
};

Trajectory run(const FlowState& initial, const SolverConfig& cfg);

Snapshot make_snapshot(const FlowState& state, const SolverConfig& cfg);

std::string to_string(RunStatus s);
std::string to_string(FlowMode m);

/// Columns: t, r_T, z_x, z_y, T_dil, E_int, E_bulk, E, amp_0..amp_8, dissipation.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);
nlohmann::json trajectory_metadata(const Trajectory& traj, const SolverConfig& cfg);

}  // namespace mcflab

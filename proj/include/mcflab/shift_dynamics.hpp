#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcflab/calibration.hpp"
#include "mcflab/geometry.hpp"
#include "mcflab/graph_flow.hpp"
#include "mcflab/strong_solution.hpp"

namespace mcflab {

/// Weak interface as a function of physical time.
using WeakTrajectory = std::function<ClosedCurve(double)>;

struct ShiftSample {
  double t = 0.0;
  Point2 z;
  double time_dilation = 0.0;
  double r_T = 0.0;
  ShiftRates rates;
};

enum class ShiftStatus { reached_horizon, extinct };

struct ShiftTrajectory {
  std::vector<ShiftSample> samples;
  ShiftStatus status = ShiftStatus::reached_horizon;
  /// Horizon estimate t_chi (the last level time).
  double horizon = 0.0;
  /// t_k for each truncation level, in the order solved.
  std::vector<double> level_times;
  std::vector<int> levels;

  double max_abs_z() const;
  double max_abs_dilation() const;
};

struct ShiftRhsOptions {
  std::size_t rays = 128;
  double c_T = 4.0;
  double c_z = 6.0;
};

/// Shift velocities from the error heights of an arbitrary weak curve.
ShiftRates shift_rhs_general(const ClosedCurve& weak, const ShiftedInterface& si,
                             const CutoffProfiles& profiles, const ShiftRhsOptions& opts = {});

enum class ShiftLaw {
  error_heights,  // cut-off error heights (valid for any weak curve)
  graph_heights,  // plain graph heights over the shifted circle, no cutoff
};

struct IntegrateOptions {
  ShiftLaw law = ShiftLaw::error_heights;
  double dt = 1e-3;
  /// Steps are also limited to dt_rel * r_T^2.
  double dt_rel = 0.02;
  double t_end = 1e300;
  /// Stop once T reaches T_ext (1 - 1/cap_k).
  int cap_k = 16;
  ShiftRhsOptions rhs;
  CutoffProfiles profiles;
};

/// Forward RK4 integration of the shift ODE driven by a weak trajectory.
ShiftTrajectory integrate_shifts(const WeakTrajectory& weak, const ShrinkingCircle& sc,
                                 const IntegrateOptions& opts);

struct PicardConfig {
  int truncation_k = 16;
  double fixed_point_tol = 1e-10;
  int max_iters = 200;
  std::size_t mesh_nodes = 2048;
  double damping = 0.5;
  /// Mesh intervals per Picard window.
  std::size_t window = 8;
  /// End of the time mesh; 0 picks 2 T_ext, the largest possible horizon.
  double t_max = 0.0;
  ShiftRhsOptions rhs;
};

/// Solves the truncated shift problems for k = 2, 4, ..., truncation_k by
/// damped Picard iteration on a uniform mesh and glues them together.
ShiftTrajectory picard_existence(const WeakTrajectory& weak, const ShrinkingCircle& sc,
                                 const PicardConfig& cfg, const CutoffProfiles& profiles);

struct ShiftBoundsResult {
  bool pass = false;
  double bound = 0.0;    // sqrt(E0 / r0)
  double z_ratio = 0.0;  // max|z| / r0
  double T_ratio = 0.0;  // max|T - id| / T_ext
  double z_margin = 0.0;
  double T_margin = 0.0;
};

ShiftBoundsResult shift_bounds_check(const ShiftTrajectory& st, double r0, double T_ext, double E0);

std::string to_string(ShiftStatus s);
/// Columns: t, z_x, z_y, T_dil, r_T.
void write_shift_csv(const ShiftTrajectory& st, std::ostream& os);

}  // namespace mcflab

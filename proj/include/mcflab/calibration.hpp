#pragma once

#include <vector>

#include "mcflab/geometry.hpp"
#include "mcflab/strong_solution.hpp"

namespace mcflab {

enum class Profile { eta, zeta, theta_bar };

/// Cutoff profiles used by the calibration and the error heights.
///
///  - eta:       1 on |s| <= 1/8, 0 on |s| >= 1/4, |eta'| <= 15.
///  - zeta:      1 on |s| <= 1/(16 C_zeta), 0 on |s| >= 1/(8 C_zeta).
///  - theta_bar: -s on |s| <= 1/4, -1 for s >= 1/2, +1 for s <= -1/2,
///               |theta_bar'| <= 3.625.
///
/// Transition bands use the C^2 quintic smoothstep. theta_bar has to leave
/// the band with slope -1 and cannot be a plain smoothstep without breaking
/// the Lipschitz bound, so its derivative is a smoothstep-ramped plateau.
struct CutoffProfiles {
  double c_zeta = 4.0;

  double eta(double s) const;
  double eta_prime(double s) const;
  double zeta(double s) const;
  /// Exact integral of zeta over [a, b].
  double zeta_integral(double a, double b) const;
  double theta_bar(double s) const;
  double theta_bar_prime(double s) const;
  /// Points s >= 0 where theta_bar changes polynomial piece (mirror for s < 0).
  std::vector<double> theta_bar_knots() const;

  double zeta_inner() const { return 1.0 / (16.0 * c_zeta); }
  double zeta_outer() const { return 1.0 / (8.0 * c_zeta); }
};

double profile_eval(const CutoffProfiles& profiles, Profile which, double s);

/// Calibration fields at one space-time point. Only the two-phase difference
/// xi_{1,P} = -xi is ever needed; xi itself extends the inward normal.
struct CalibrationEval {
  double sdist = 0.0;
  Point2 xi;
  Point2 B;
  double vartheta = 0.0;
  double div_xi = 0.0;
  Point2 dt_xi;
  double dt_vartheta = 0.0;
  Mat2 grad_xi;
  Mat2 grad_B;
  double div_B = 0.0;
  Point2 grad_vartheta;
};

/// Closed-form calibration of the shifted shrinking circle at x, for shift
/// velocities (zdot, tdot). Throws DegenerateGeometryError at the center.
CalibrationEval calibration_at(const ShiftedInterface& si, const Point2& x, const Point2& zdot,
                               double tdot, const CutoffProfiles& profiles);

}  // namespace mcflab

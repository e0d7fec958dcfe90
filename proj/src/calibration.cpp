#include "mcflab/calibration.hpp"

#include <cmath>

#include "mcflab/errors.hpp"

namespace mcflab {

namespace {

double smoothstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
double smoothstep_prime(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }
/// Integral of smoothstep over [0, u].
double smoothstep_integral(double u) { return u * u * u * u * (2.5 + u * (-3.0 + u)); }

/// 1 on [0, a], smoothstep down to 0 on [a, 2a], as a function of |s|.
double plateau(double s, double a) {
  const double x = std::abs(s);
  if (x <= a) return 1.0;
  if (x >= 2.0 * a) return 0.0;
  return 1.0 - smoothstep((x - a) / a);
}

double plateau_prime(double s, double a) {
  const double x = std::abs(s);
  if (x <= a || x >= 2.0 * a) return 0.0;
  const double d = -smoothstep_prime((x - a) / a) / a;
  return s < 0.0 ? -d : d;
}

/// Integral of plateau over [0, x] for x >= 0.
double plateau_integral(double x, double a) {
  if (x <= a) return x;
  if (x >= 2.0 * a) return 1.5 * a;
  const double u = (x - a) / a;
  return a + a * (u - smoothstep_integral(u));
}

// theta_bar on the band s in [1/4, 1/2]: u = 4 (s - 1/4) in [0, 1], derivative
// ramps from -1 to -kPlateau over [0, kRamp], holds, then ramps to 0.
constexpr double kRamp = 0.2;
constexpr double kPlateau = (3.0 - 0.5 * kRamp) / (1.0 - kRamp);

double band_slope(double u) {
  if (u <= kRamp) return -1.0 - (kPlateau - 1.0) * smoothstep(u / kRamp);
  if (u <= 1.0 - kRamp) return -kPlateau;
  return -kPlateau * (1.0 - smoothstep((u - (1.0 - kRamp)) / kRamp));
}

/// Integral over [0, u] of band_slope (in u units).
double band_value(double u) {
  const double g_a = -kRamp - (kPlateau - 1.0) * 0.5 * kRamp;
  if (u <= kRamp) return -u - (kPlateau - 1.0) * kRamp * smoothstep_integral(u / kRamp);
  const double g_b = g_a - kPlateau * (1.0 - 2.0 * kRamp);
  if (u <= 1.0 - kRamp) return g_a - kPlateau * (u - kRamp);
  const double v = (u - (1.0 - kRamp)) / kRamp;
  return g_b - kPlateau * kRamp * (v - smoothstep_integral(v));
}

}  // namespace

double CutoffProfiles::eta(double s) const { return plateau(s, 0.125); }
double CutoffProfiles::eta_prime(double s) const { return plateau_prime(s, 0.125); }
double CutoffProfiles::zeta(double s) const { return plateau(s, zeta_inner()); }

double CutoffProfiles::zeta_integral(double a, double b) const {
  auto prim = [this](double x) {
    const double v = plateau_integral(std::abs(x), zeta_inner());
    return x < 0.0 ? -v : v;
  };
  return prim(b) - prim(a);
}

double CutoffProfiles::theta_bar(double s) const {
  const double x = std::abs(s);
  double v;
  if (x <= 0.25) {
    v = -x;
  } else if (x >= 0.5) {
    v = -1.0;
  } else {
    v = -0.25 + 0.25 * band_value(4.0 * (x - 0.25));
  }
  return s < 0.0 ? -v : v;
}

double CutoffProfiles::theta_bar_prime(double s) const {
  const double x = std::abs(s);
  if (x <= 0.25) return -1.0;
  if (x >= 0.5) return 0.0;
  return band_slope(4.0 * (x - 0.25));  // even function of s
}

std::vector<double> CutoffProfiles::theta_bar_knots() const {
  return {0.25, 0.25 + 0.25 * kRamp, 0.5 - 0.25 * kRamp, 0.5};
}

double profile_eval(const CutoffProfiles& profiles, Profile which, double s) {
  switch (which) {
    case Profile::eta: return profiles.eta(s);
    case Profile::zeta: return profiles.zeta(s);
    case Profile::theta_bar: return profiles.theta_bar(s);
  }
  return 0.0;
}

CalibrationEval calibration_at(const ShiftedInterface& si, const Point2& x, const Point2& zdot,
                               double tdot, const CutoffProfiles& profiles) {
  if (!std::isfinite(x.x) || !std::isfinite(x.y)) throw ArgumentError("calibration_at: non-finite point");
  const double r = si.radius();
  const Point2 u = x - si.center();
  const double d = norm(u);
  if (d <= 1e-14 * r) throw DegenerateGeometryError("calibration_at: projection undefined at the center");

  const Point2 n = -(u / d);           // inward normal at the foot point
  const Point2 tau = rotate_cw(n);
  const double s = r - d;              // signed distance, positive inside
  const double H = 1.0 / r;
  const double Hp = 0.0;               // tangential curvature derivative of a circle
  const double jac = 1.0 - H * s;      // = d / r
  const double one_t = 1.0 + tdot;

  const double eta = profiles.eta(s / r);
  const double eta_p = profiles.eta_prime(s / r);
  const double tb = profiles.theta_bar(s / r);
  const double tb_p = profiles.theta_bar_prime(s / r);

  CalibrationEval c;
  c.sdist = s;
  c.xi = eta * n;
  c.B = (eta * H) * n;
  c.vartheta = tb / r;

  c.grad_xi = (eta_p / r) * outer(n, n) + (-eta * H / jac) * outer(tau, tau);
  c.div_xi = eta_p / r - eta * H / jac;
  c.grad_B = H * c.grad_xi + (eta * Hp / jac) * outer(n, tau);
  c.div_B = H * c.div_xi;
  c.grad_vartheta = (tb_p / (r * r)) * n;

  const double dt_s = -H * one_t - dot(n, zdot);
  const double dt_s_over_r = dt_s / r + s * one_t / (r * r * r);
  c.dt_xi = (eta_p * dt_s_over_r) * n + (eta * (-Hp * one_t + H * dot(tau, zdot)) / jac) * tau;
  c.dt_vartheta = one_t * tb / (r * r * r) + tb_p * dt_s_over_r / r;
  return c;
}

}  // namespace mcflab

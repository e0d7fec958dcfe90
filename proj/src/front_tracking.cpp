#include "mcflab/front_tracking.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <span>

#include "mcflab/errors.hpp"
#include "mcflab/strong_solution.hpp"

namespace mcflab {

namespace {

constexpr std::size_t kGauss = 5;

struct GaussRule {
  std::array<double, kGauss> x{};
  std::array<double, kGauss> w{};
};

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    GaussRule g;
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(kGauss);
    for (std::size_t i = 0; i < kGauss; ++i) gsl_integration_glfixed_point(0.0, 1.0, i, &g.x[i], &g.w[i], t);
    gsl_integration_glfixed_table_free(t);
    return g;
  }();
  return rule;
}

struct SplineDeleter {
  void operator()(gsl_spline* s) const { gsl_spline_free(s); }
};

/// Periodic cubic spline (x(u), y(u)) through the markers, u = chord length.
class PeriodicCurveSpline {
public:
  explicit PeriodicCurveSpline(const ClosedCurve& c) {
    const std::size_t n = c.size();
    u_.resize(n + 1);
    std::vector<double> xs(n + 1), ys(n + 1);
    u_[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = c[i].x;
      ys[i] = c[i].y;
      u_[i + 1] = u_[i] + norm(c.at_cyclic(static_cast<std::ptrdiff_t>(i) + 1) - c[i]);
    }
    xs[n] = xs[0];
    ys[n] = ys[0];
    sx_.reset(gsl_spline_alloc(gsl_interp_cspline_periodic, n + 1));
    sy_.reset(gsl_spline_alloc(gsl_interp_cspline_periodic, n + 1));
    gsl_spline_init(sx_.get(), u_.data(), xs.data(), n + 1);
    gsl_spline_init(sy_.get(), u_.data(), ys.data(), n + 1);
    acc_x_.reset(gsl_interp_accel_alloc());
    acc_y_.reset(gsl_interp_accel_alloc());
  }

  const std::vector<double>& knots() const { return u_; }
  double period() const { return u_.back(); }

  Point2 eval(double u) const {
    return {gsl_spline_eval(sx_.get(), u, acc_x_.get()), gsl_spline_eval(sy_.get(), u, acc_y_.get())};
  }
  double speed(double u) const {
    return std::hypot(gsl_spline_eval_deriv(sx_.get(), u, acc_x_.get()),
                      gsl_spline_eval_deriv(sy_.get(), u, acc_y_.get()));
  }
  /// Arc length over [a, b] inside one spline piece.
  double arc(double a, double b) const {
    const GaussRule& g = gauss_rule();
    double s = 0.0;
    for (std::size_t q = 0; q < kGauss; ++q) s += g.w[q] * speed(a + (b - a) * g.x[q]);
    return s * (b - a);
  }

private:
  struct AccelDeleter {
    void operator()(gsl_interp_accel* a) const { gsl_interp_accel_free(a); }
  };
  std::vector<double> u_;
  std::unique_ptr<gsl_spline, SplineDeleter> sx_, sy_;
  std::unique_ptr<gsl_interp_accel, AccelDeleter> acc_x_, acc_y_;
};

/// Each knot interval split into this many pieces for the arc-length table.
constexpr std::size_t kSub = 4;

/// Marker velocity: turning-angle curvature along the chord normal plus a
/// tangential pull toward the neighbour midpoint, which keeps spacing even
/// without changing the evolved set.
std::vector<Point2> velocity(std::span<const Point2> p) {
  const std::size_t n = p.size();
  std::vector<Point2> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& pm = p[(i + n - 1) % n];
    const Point2& pp = p[(i + 1) % n];
    const Point2 a = p[i] - pm;
    const Point2 b = pp - p[i];
    const Point2 chord = pp - pm;
    const double chord_len = norm(chord);
    if (!(chord_len > 0.0)) throw DegenerateGeometryError("ft_step: coincident markers");
    const Point2 tau = chord / chord_len;
    // A vertex moving along the chord normal sweeps area at rate
    // |chord| / 2 * H, so H = 2 * turning / |chord| makes the polygon lose area
    // at exactly 2 pi like the smooth flow.
    const double H = 2.0 * std::atan2(cross(a, b), dot(a, b)) / chord_len;
    const double hbar = 0.5 * (norm(a) + norm(b));
    const double tang = dot(b - a, tau) / (hbar * hbar);
    v[i] = H * rotate_ccw(tau) + tang * tau;
  }
  return v;
}

MarkerCurve step_impl(const MarkerCurve& mc, double dt, double cfl, bool check_simple) {
  if (!(dt > 0.0)) throw ArgumentError("ft_step needs dt > 0");
  const std::span<const Point2> p = mc.curve.samples();
  const std::size_t n = p.size();
  const double hmin = min_spacing(mc.curve);
  const double dt_max = cfl * hmin * hmin;
  if (dt > dt_max) throw StepRejectedError("ft_step: dt exceeds cfl * (min spacing)^2", dt_max);
  // Heun's method: explicit, and second order so the area lost per unit time
  // stays at 2 pi up to O(dt^2).
  const std::vector<Point2> v1 = velocity(p);
  std::vector<Point2> mid(n);
  for (std::size_t i = 0; i < n; ++i) mid[i] = p[i] + dt * v1[i];
  const std::vector<Point2> v2 = velocity(mid);
  std::vector<Point2> next(n);
  for (std::size_t i = 0; i < n; ++i) next[i] = p[i] + (0.5 * dt) * (v1[i] + v2[i]);
  MarkerCurve out;
  out.curve = ClosedCurve(std::move(next));
  out.step_count = mc.step_count + 1;
  out.last_redistribution_step = mc.last_redistribution_step;
  if (check_simple && !is_simple(out.curve)) throw TopologyError("ft_step: self-intersection after step");
  return out;
}

}  // namespace

double min_spacing(const ClosedCurve& curve) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.size(); ++i) {
    m = std::min(m, norm(curve.at_cyclic(static_cast<std::ptrdiff_t>(i) + 1) - curve[i]));
  }
  return m;
}

double spacing_ratio(const ClosedCurve& curve) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double d = norm(curve.at_cyclic(static_cast<std::ptrdiff_t>(i) + 1) - curve[i]);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return hi / lo;
}

MarkerCurve ft_step(const MarkerCurve& mc, double dt, double cfl) { return step_impl(mc, dt, cfl, true); }

double spline_length(const ClosedCurve& curve) {
  PeriodicCurveSpline sp(curve);
  const auto& u = sp.knots();
  double L = 0.0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) L += sp.arc(u[i], u[i + 1]);
  return L;
}

MarkerCurve resample(const MarkerCurve& mc, std::size_t N) {
  if (N < 8) throw ArgumentError("resample needs at least 8 markers");
  if (mc.curve.size() < 3) throw ArgumentError("resample needs a valid curve");
  PeriodicCurveSpline sp(mc.curve);
  const auto& u = sp.knots();

  // Cumulative arc length on a refined parameter table.
  std::vector<double> uu{0.0}, ss{0.0};
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double du = (u[i + 1] - u[i]) / kSub;
    for (std::size_t q = 0; q < kSub; ++q) {
      const double a = u[i] + q * du;
      const double b = (q + 1 == kSub) ? u[i + 1] : a + du;
      uu.push_back(b);
      ss.push_back(ss.back() + sp.arc(a, b));
    }
  }
  const double L = ss.back();

  std::vector<Point2> pts(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double target = L * static_cast<double>(j) / static_cast<double>(N);
    const auto it = std::upper_bound(ss.begin(), ss.end(), target);
    std::size_t k = static_cast<std::size_t>(it - ss.begin());
    k = std::clamp<std::size_t>(k, 1, ss.size() - 1) - 1;
    const double u0 = uu[k];
    const double u1 = uu[k + 1];
    double v = u0 + (u1 - u0) * (target - ss[k]) / (ss[k + 1] - ss[k]);
    for (int newton = 0; newton < 3; ++newton) {
      const double f = ss[k] + sp.arc(u0, v) - target;
      v -= f / sp.speed(v);
      v = std::clamp(v, u0, u1);
    }
    pts[j] = sp.eval(v);
  }
  MarkerCurve out;
  out.curve = ClosedCurve(std::move(pts));
  out.step_count = mc.step_count;
  out.last_redistribution_step = mc.step_count;
  return out;
}

bool is_convex(const ClosedCurve& curve) {
  const std::size_t n = curve.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = curve[i] - curve.at_cyclic(static_cast<std::ptrdiff_t>(i) - 1);
    const Point2 b = curve.at_cyclic(static_cast<std::ptrdiff_t>(i) + 1) - curve[i];
    if (cross(a, b) < 0.0) return false;
  }
  return true;
}

FTResult run_ft(const MarkerCurve& initial, const FTConfig& cfg) {
  if (cfg.N < 64 || !(cfg.stop_area > 0.0) || !(cfg.cfl > 0.0) || cfg.snapshots < 2) {
    throw ArgumentError("run_ft: invalid configuration");
  }
  if (!is_simple(initial.curve)) throw TopologyError("run_ft: initial curve is not simple");
  FTResult res;
  MarkerCurve mc = resample(initial, cfg.N);
  const double A0 = curve_metrics(mc.curve).area;
  if (A0 <= cfg.stop_area) throw ArgumentError("run_ft: initial area already below stop_area");
  res.extinction_estimate = extinction_time_from_area(A0);
  const double T = res.extinction_estimate;

  double t = 0.0;
  const double dA = (A0 - cfg.stop_area) / static_cast<double>(cfg.snapshots - 1);
  double next_area = A0;
  auto snapshot = [&](double area) {
    FTSnapshot s;
    s.t = t;
    s.mc = mc;
    const auto m = curve_metrics(mc.curve);
    s.area = m.area;
    s.length = m.length;
    s.centroid = area_centroid(mc.curve);
    s.r_ref = T - t > 0.0 ? std::sqrt(2.0 * (T - t)) : std::sqrt(area / std::numbers::pi);
    s.dev = circle_closeness(mc.curve, s.r_ref);
    s.convex = is_convex(mc.curve);
    if (s.convex && res.convexity_onset < 0.0) res.convexity_onset = t;
    res.snapshots.push_back(std::move(s));
  };

  double area = A0;
  while (true) {
    if (area <= next_area + 1e-15 || area <= cfg.stop_area) {
      snapshot(area);
      while (next_area >= area) next_area -= dA;
    }
    if (area <= cfg.stop_area) break;
    const double h = min_spacing(mc.curve);
    const double dt = cfg.cfl * h * h;
    mc = step_impl(mc, dt, cfg.cfl, false);
    t += dt;
    ++res.steps;
    if (cfg.simple_check_every > 0 && res.steps % cfg.simple_check_every == 0 && !is_simple(mc.curve)) {
      throw TopologyError("run_ft: self-intersection at t = " + std::to_string(t));
    }
    if (cfg.resample_every > 0 && res.steps % cfg.resample_every == 0 &&
        spacing_ratio(mc.curve) > cfg.resample_ratio) {
      mc = resample(mc, cfg.N);
    }
    area = curve_metrics(mc.curve).area;
  }
  return res;
}

nlohmann::json ft_manifest(const FTResult& res) {
  nlohmann::json j;
  j["extinction_estimate"] = res.extinction_estimate;
  j["convexity_onset"] = res.convexity_onset;
  j["steps"] = res.steps;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
    const auto& s = res.snapshots[i];
    rows.push_back({{"index", i},
                    {"t", s.t},
                    {"area", s.area},
                    {"length", s.length},
                    {"centroid", {s.centroid.x, s.centroid.y}},
                    {"r_ref", s.r_ref},
                    {"length_dev", s.dev.length_dev},
                    {"normal_dev", s.dev.normal_dev},
                    {"curvature_dev", s.dev.curvature_dev},
                    {"curvature_grad_dev", s.dev.curvature_grad_dev},
                    {"convex", s.convex}});
  }
  j["snapshots"] = rows;
  return j;
}

}  // namespace mcflab

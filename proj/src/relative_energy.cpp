#include "mcflab/relative_energy.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "mcflab/errors.hpp"
#include "mcflab/spectral.hpp"

namespace mcflab {

namespace {

constexpr double kPi = std::numbers::pi;

/// Distances s > 0 at which the ray z + s e crosses the polygon, sorted.
/// Vertices on the ray are counted once through a half-open side rule.
std::vector<double> crossings_once(const ClosedCurve& c, const Point2& z, const Point2& e) {
  std::vector<double> out;
  const std::size_t n = c.size();
  Point2 p = c[n - 1] - z;
  double cp = cross(e, p);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 q = c[i] - z;
    const double cq = cross(e, q);
    if ((cp >= 0.0) != (cq >= 0.0)) {
      const double lam = cp / (cp - cq);
      const double s = dot(p + lam * (q - p), e);
      if (s > 0.0) out.push_back(s);
    }
    p = q;
    cp = cq;
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Ray crossings with a parity check against the phase at the ray origin. A
/// failing ray is nudged by a tiny angle and retried before giving up.
std::vector<double> ray_crossings(const ClosedCurve& c, const Point2& z, double phi, bool inside_at_z) {
  for (int attempt = 0; attempt < 4; ++attempt) {
    const double a = phi + 1e-9 * attempt;
    auto s = crossings_once(c, z, unit_from_angle(a));
    if ((s.size() % 2 == 1) == inside_at_z) return s;
  }
  throw DegenerateGeometryError("ray casting could not resolve a tangential crossing");
}

/// Phase indicator of the weak region at distance s along a ray.
bool inside_at(const std::vector<double>& cr, bool inside_at_z, double s) {
  const auto passed = std::lower_bound(cr.begin(), cr.end(), s) - cr.begin();
  return (passed % 2 == 0) ? inside_at_z : !inside_at_z;
}

struct GaussRule {
  std::array<double, 6> x{};
  std::array<double, 6> w{};
};

const GaussRule& gauss6() {
  static const GaussRule rule = [] {
    GaussRule g;
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(6);
    for (std::size_t i = 0; i < 6; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &g.x[i], &g.w[i], t);
    gsl_integration_glfixed_table_free(t);
    return g;
  }();
  return rule;
}

std::vector<double> trapezoid_weights(const ClosedCurve& c) {
  const std::size_t n = c.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hm = norm(c[i] - c.at_cyclic(static_cast<std::ptrdiff_t>(i) - 1));
    const double hp = norm(c.at_cyclic(static_cast<std::ptrdiff_t>(i) + 1) - c[i]);
    w[i] = 0.5 * (hm + hp);
  }
  return w;
}

double angular_sum(const std::vector<double>& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * 2.0 * kPi / static_cast<double>(f.size());
}

}  // namespace

double ModeSpectrum::energy(double r_T) const {
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double kk = static_cast<double>(k);
    e += (1.0 + kk * kk) * (a[k] * a[k] + b[k] * b[k]);
  }
  return e / (2.0 * r_T);
}

ErrorHeights error_heights(const ClosedCurve& weak, const ShiftedInterface& si,
                           const CutoffProfiles& profiles, std::size_t M) {
  if (M < 4) throw ArgumentError("error_heights needs at least 4 rays");
  const double r = si.radius();
  const Point2 z = si.center();
  const bool in_z = winding_number(weak, z) != 0;
  ErrorHeights eh;
  eh.rho_plus.resize(M);
  eh.rho_minus.resize(M);
  eh.rho.resize(M);

  // Integral of zeta(l / r) over s in [s1, s2], with l = r - s.
  auto zeta_ds = [&](double s1, double s2) { return r * profiles.zeta_integral((r - s2) / r, (r - s1) / r); };
  // Integral over [lo, hi] of the weak indicator (want_inside) or its complement.
  auto integrate = [&](const std::vector<double>& cr, double lo, double hi, bool want_inside) {
    std::vector<double> br{lo};
    for (double s : cr) {
      if (s > lo && s < hi) br.push_back(s);
    }
    br.push_back(hi);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const double mid = 0.5 * (br[i] + br[i + 1]);
      if (inside_at(cr, in_z, mid) == want_inside) acc += zeta_ds(br[i], br[i + 1]);
    }
    return acc;
  };

  for (std::size_t j = 0; j < M; ++j) {
    const double phi = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(M);
    const auto cr = ray_crossings(weak, z, phi, in_z);
    // Inside the strong disc (s < r) the strong phase is 1, so the mismatch
    // is where the weak phase is 0; outside it is where the weak phase is 1.
    eh.rho_plus[j] = integrate(cr, 0.5 * r, r, false);
    eh.rho_minus[j] = -integrate(cr, r, 1.5 * r, true);
    eh.rho[j] = eh.rho_plus[j] + eh.rho_minus[j];
  }
  return eh;
}

std::vector<double> graph_heights(const ClosedCurve& weak, const ShiftedInterface& si, std::size_t M) {
  if (M < 4) throw ArgumentError("graph_heights needs at least 4 rays");
  const double r = si.radius();
  const Point2 z = si.center();
  const bool in_z = winding_number(weak, z) != 0;
  std::vector<double> h(M);
  for (std::size_t j = 0; j < M; ++j) {
    const double phi = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(M);
    const auto cr = ray_crossings(weak, z, phi, in_z);
    if (cr.empty()) throw DegenerateGeometryError("graph_heights: ray misses the weak curve");
    double best = cr.front();
    for (double s : cr) {
      if (std::abs(s - r) < std::abs(best - r)) best = s;
    }
    h[j] = r - best;
  }
  return h;
}

double e_int(const ClosedCurve& weak, const ShiftedInterface& si, const CutoffProfiles& profiles) {
  const auto fr = frames(weak);
  const auto w = trapezoid_weights(weak);
  double acc = 0.0;
  for (std::size_t i = 0; i < weak.size(); ++i) {
    const auto cal = calibration_at(si, weak[i], {}, 0.0, profiles);
    acc += (1.0 - dot(fr[i].normal, cal.xi)) * w[i];
  }
  return acc;
}

double e_bulk(const ClosedCurve& weak, const ShiftedInterface& si, const CutoffProfiles& profiles,
              std::size_t rays) {
  const std::size_t M = rays == 0 ? 4 * weak.size() : rays;
  if (M < 4) throw ArgumentError("e_bulk needs at least 4 rays");
  const double r = si.radius();
  const Point2 z = si.center();
  const bool in_z = winding_number(weak, z) != 0;
  const GaussRule& g = gauss6();

  std::vector<double> knots_s;
  for (double k : profiles.theta_bar_knots()) {
    knots_s.push_back(r * (1.0 - k));
    knots_s.push_back(r * (1.0 + k));
  }

  // |theta| * s, the polar-coordinate integrand on the mismatch set.
  auto f = [&](double s) { return std::abs(profiles.theta_bar((r - s) / r)) / r * s; };

  double total = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    const double phi = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(M);
    const auto cr = ray_crossings(weak, z, phi, in_z);
    const double end = std::max(r, cr.empty() ? 0.0 : cr.back());
    std::vector<double> br{0.0, r, end};
    for (double s : cr) br.push_back(s);
    for (double s : knots_s) {
      if (s < end) br.push_back(s);
    }
    std::sort(br.begin(), br.end());
    double ray = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const double a = br[i], b = br[i + 1];
      if (b - a <= 0.0) continue;
      const double mid = 0.5 * (a + b);
      if (inside_at(cr, in_z, mid) == (mid < r)) continue;
      const double half = 0.5 * (b - a);
      for (std::size_t q = 0; q < g.x.size(); ++q) ray += g.w[q] * half * f(mid + half * g.x[q]);
    }
    total += ray;
  }
  return total * 2.0 * kPi / static_cast<double>(M);
}

PerturbativeEnergy perturbative_energy(const HeightField& h, double r_T) {
  if (!(r_T > 0.0)) throw ArgumentError("perturbative_energy needs r_T > 0");
  const std::size_t n = h.size();
  PeriodicFFT& fft = thread_fft(n);
  const auto c = fft.forward(h.values);
  // Parseval for the trigonometric interpolant, Nyquist mode as a cosine.
  double sq = 0.0, dsq = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double mult = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    const double kk = static_cast<double>(k);
    sq += mult * std::norm(c[k]);
    dsq += mult * kk * kk * std::norm(c[k]);
  }
  const double scale = 2.0 * kPi / (static_cast<double>(n) * static_cast<double>(n));
  PerturbativeEnergy pe;
  pe.e_bulk_approx = 0.5 * sq * scale / r_T;
  pe.e_int_approx = 0.5 * dsq * scale / r_T;
  return pe;
}

ModeSpectrum mode_spectrum(const HeightField& h, std::size_t K) {
  const std::size_t n = h.size();
  if (K + 1 > n / 2) throw ArgumentError("mode_spectrum: K must be at most N/2 - 1");
  PeriodicFFT& fft = thread_fft(n);
  const auto c = fft.forward(h.values);
  const double dphi = 2.0 * kPi / static_cast<double>(n);
  ModeSpectrum ms;
  ms.a.assign(K + 1, 0.0);
  ms.b.assign(K + 1, 0.0);
  ms.a[0] = dphi * c[0].real() / std::sqrt(2.0 * kPi);
  for (std::size_t k = 1; k <= K; ++k) {
    ms.a[k] = dphi * c[k].real() / std::sqrt(kPi);
    ms.b[k] = -dphi * c[k].imag() / std::sqrt(kPi);
  }
  return ms;
}

TimeClass classify_time(double dissipation, double r_T, double Lambda) {
  if (!(r_T > 0.0)) throw ArgumentError("classify_time needs r_T > 0");
  TimeClass tc;
  tc.threshold = Lambda * 2.0 * kPi / r_T;
  tc.measured_dissipation = dissipation;
  tc.label = dissipation >= tc.threshold ? TimeLabel::non_regular : TimeLabel::regular;
  return tc;
}

double curve_dissipation(const ClosedCurve& weak) {
  const auto fr = frames(weak);
  const auto w = trapezoid_weights(weak);
  double acc = 0.0;
  for (std::size_t i = 0; i < weak.size(); ++i) acc += fr[i].curvature * fr[i].curvature * w[i];
  return acc;
}

double graph_dissipation(const HeightField& h, double r_T) {
  const std::size_t n = h.size();
  PeriodicFFT& fft = thread_fft(n);
  const auto d1 = fft.derivative(h.values, 1);
  const auto d2 = fft.derivative(h.values, 2);
  std::vector<double> f(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double hp = d1[j] / r_T;
    const double hpp = d2[j] / (r_T * r_T);
    const double H = graph_frame(r_T, h[j], hp, hpp).curvature;
    const double q = 1.0 - h[j] / r_T;
    f[j] = H * H * r_T * std::sqrt(q * q + hp * hp);
  }
  return angular_sum(f);
}

TimeClass dissipation_and_classify(const ClosedCurve& weak, double r_T, double Lambda) {
  return classify_time(curve_dissipation(weak), r_T, Lambda);
}

TimeClass dissipation_and_classify(const HeightField& h, double r_T, double Lambda) {
  return classify_time(graph_dissipation(h, r_T), r_T, Lambda);
}

StabilityRhs stability_rhs(const HeightField& h, double r_T, const Point2& zdot, double tdot) {
  if (!(r_T > 0.0)) throw ArgumentError("stability_rhs needs r_T > 0");
  const std::size_t n = h.size();
  PeriodicFFT& fft = thread_fft(n);
  const auto d1 = fft.derivative(h.values, 1);
  const auto d2 = fft.derivative(h.values, 2);
  const double r = r_T;
  const double H = 1.0 / r;   // curvature of the reference circle
  const double Hp = 0.0;      // and its tangential derivative

  // Integrals over the circle with dH^1 = r dphi and arc-length derivatives.
  std::vector<double> t1(n), t2(n), t3(n), t4(n), t5(n), t6(n), t7(n), t8(n);
  std::vector<double> q2(n), q1(n), q0(n), m0(n), mc(n), ms(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = HeightField::angle(j, n);
    const Point2 nb = circle_normal(phi);
    const Point2 tb = rotate_cw(nb);
    const double hv = h[j];
    const double hp = d1[j] / r;
    const double hpp = d2[j] / (r * r);
    t1[j] = -hpp * hpp * r;
    t2[j] = (1.5 * H * H - 1.0 / (r * r)) * hp * hp * r;
    t3[j] = (0.5 * H * H + 1.0 / (r * r)) * hv * hv / (r * r) * r;
    t4[j] = -(1.0 / (r * r) + H * H) * hv * dot(nb, zdot) * r;
    t5[j] = -H * hv * tdot / (r * r) * r;
    t6[j] = -Hp * dot(tb, zdot) * hv * r;
    t7[j] = -Hp * tdot * hp * r;
    t8[j] = 2.0 * H * Hp * hv * hp * r;
    q2[j] = d2[j] * d2[j];
    q1[j] = d1[j] * d1[j];
    q0[j] = hv * hv;
    m0[j] = hv;
    mc[j] = hv * std::cos(phi);
    ms[j] = hv * std::sin(phi);
  }

  StabilityRhs out;
  const std::array<std::pair<const char*, std::vector<double>*>, 8> named{{
      {"hpp_sq", &t1}, {"hp_sq", &t2}, {"h_sq", &t3}, {"shift_z", &t4},
      {"shift_T", &t5}, {"Hp_tau_z", &t6}, {"Hp_T_hp", &t7}, {"H_Hp_h_hp", &t8},
  }};
  for (const auto& [name, vec] : named) {
    const double v = angular_sum(*vec);
    out.terms.emplace_back(name, v);
    out.R_lot += v;
  }

  const double r3 = r * r * r;
  const double quad = -(angular_sum(q2) - 0.5 * angular_sum(q1) - 1.5 * angular_sum(q0)) / r3;
  const double mass = angular_sum(m0) / std::sqrt(2.0 * kPi);
  const double fc = angular_sum(mc) / std::sqrt(kPi);
  const double fs = angular_sum(ms) / std::sqrt(kPi);
  const double frozen_mass = -4.0 * mass * mass / r3;
  const double frozen_first = -6.0 * (fc * fc + fs * fs) / r3;
  out.terms.emplace_back("frozen_quadratic", quad);
  out.terms.emplace_back("frozen_mass", frozen_mass);
  out.terms.emplace_back("frozen_first_moment", frozen_first);
  out.R_lot_frozen = quad + frozen_mass + frozen_first;
  return out;
}

EnergyBreakdown energy_breakdown(const HeightField& h, const ShiftedInterface& si,
                                 const CutoffProfiles& profiles, const BreakdownOptions& opts) {
  const double r = si.radius();
  EnergyBreakdown eb;
  const auto pe = perturbative_energy(h, r);
  eb.perturbative_e_bulk = pe.e_bulk_approx;
  eb.perturbative_e_int = pe.e_int_approx;
  eb.modes = mode_spectrum(h, std::min(opts.modes, h.size() / 2 - 1));
  eb.dissipation = graph_dissipation(h, r);
  if (opts.exact) {
    const ClosedCurve weak = graph_curve(h, si);
    eb.e_int = e_int(weak, si, profiles);
    // Rays through the vertices integrate the bulk error of the smooth graph
    // rather than the chord slivers of the polygon.
    eb.e_bulk = e_bulk(weak, si, profiles, opts.bulk_rays == 0 ? h.size() : opts.bulk_rays);
  } else {
    eb.e_int = pe.e_int_approx;
    eb.e_bulk = pe.e_bulk_approx;
  }
  eb.e_total = eb.e_int + eb.e_bulk;
  return eb;
}

}  // namespace mcflab

#include "mcflab/shift_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>

#include "mcflab/errors.hpp"
#include "mcflab/relative_energy.hpp"

namespace mcflab {

namespace {

ShiftRates rates_from_heights(const std::vector<double>& rho, double r, const ShiftRhsOptions& o) {
  const std::size_t m = rho.size();
  double mean = 0.0;
  Point2 mean_n;
  for (std::size_t j = 0; j < m; ++j) {
    mean += rho[j];
    mean_n += rho[j] * circle_normal(2.0 * M_PI * static_cast<double>(j) / static_cast<double>(m));
  }
  mean /= static_cast<double>(m);
  mean_n = mean_n / static_cast<double>(m);
  return {(o.c_z / (r * r)) * mean_n, (o.c_T / r) * mean};
}

/// Shifted interface with the shifted time capped at cap (truncation).
ShiftedInterface capped_interface(const ShrinkingCircle& sc, double t, const Point2& z, double dil, double cap) {
  const double T = std::min(t + dil, cap);
  return {sc, ShiftState{z, T - t, t}};
}

struct Y {
  Point2 z;
  double dil = 0.0;
};

Y axpy(const Y& y, double a, const ShiftRates& f) { return {y.z + a * f.zdot, y.dil + a * f.tdot}; }

}  // namespace

double ShiftTrajectory::max_abs_z() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, norm(s.z));
  return m;
}

double ShiftTrajectory::max_abs_dilation() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, std::abs(s.time_dilation));
  return m;
}

ShiftRates shift_rhs_general(const ClosedCurve& weak, const ShiftedInterface& si,
                             const CutoffProfiles& profiles, const ShiftRhsOptions& opts) {
  const auto eh = error_heights(weak, si, profiles, opts.rays);
  return rates_from_heights(eh.rho, si.radius(), opts);
}

ShiftTrajectory integrate_shifts(const WeakTrajectory& weak, const ShrinkingCircle& sc,
                                 const IntegrateOptions& opts) {
  if (opts.cap_k < 1 || !(opts.dt > 0.0)) throw ArgumentError("integrate_shifts: bad options");
  const double cap = sc.extinction_time * (1.0 - 1.0 / opts.cap_k);
  auto F = [&](double t, const Y& y) {
    const ShiftedInterface si = capped_interface(sc, t, y.z, y.dil, cap);
    const ClosedCurve w = weak(t);
    if (opts.law == ShiftLaw::graph_heights) {
      return rates_from_heights(graph_heights(w, si, opts.rhs.rays), si.radius(), opts.rhs);
    }
    return shift_rhs_general(w, si, opts.profiles, opts.rhs);
  };

  ShiftTrajectory st;
  double t = 0.0;
  Y y;
  auto record = [&](double tt, const Y& yy, const ShiftRates& f) {
    const ShiftedInterface si = capped_interface(sc, tt, yy.z, yy.dil, cap);
    st.samples.push_back({tt, yy.z, yy.dil, si.radius(), f});
  };
  try {
    ShiftRates f0 = F(t, y);
    record(t, y, f0);
    while (true) {
      if (t >= opts.t_end) break;
      const double r = capped_interface(sc, t, y.z, y.dil, cap).radius();
      double h = std::min({opts.dt, opts.dt_rel * r * r, opts.t_end - t});
      // Aim the last step at the truncation time so no stage samples the
      // frozen circle past it.
      const double rate = 1.0 + f0.tdot;
      if (rate > 0.0) h = std::min(h, (cap - (t + y.dil)) / rate);
      const ShiftRates k1 = f0;
      const ShiftRates k2 = F(t + 0.5 * h, axpy(y, 0.5 * h, k1));
      const ShiftRates k3 = F(t + 0.5 * h, axpy(y, 0.5 * h, k2));
      const ShiftRates k4 = F(t + h, axpy(y, h, k3));
      Y y1;
      y1.z = y.z + (h / 6.0) * (k1.zdot + 2.0 * k2.zdot + 2.0 * k3.zdot + k4.zdot);
      y1.dil = y.dil + (h / 6.0) * (k1.tdot + 2.0 * k2.tdot + 2.0 * k3.tdot + k4.tdot);
      const double T0 = t + y.dil;
      const double T1 = t + h + y1.dil;
      if (T1 >= cap - 1e-12 * cap) {
        // Land exactly on the truncation time by linear interpolation.
        const double lam = T1 > cap ? (cap - T0) / (T1 - T0) : 1.0;
        Y yc;
        yc.z = y.z + lam * (y1.z - y.z);
        yc.dil = y.dil + lam * (y1.dil - y.dil);
        const double tc = t + lam * h;
        record(tc, yc, F(tc, yc));
        st.horizon = tc;
        break;
      }
      t += h;
      y = y1;
      f0 = F(t, y);
      record(t, y, f0);
    }
    st.status = ShiftStatus::reached_horizon;
    if (st.horizon == 0.0) st.horizon = t;
  } catch (const ExtinctError&) {
    st.status = ShiftStatus::extinct;
    st.horizon = t;
  }
  st.level_times.push_back(st.horizon);
  st.levels.push_back(opts.cap_k);
  return st;
}

ShiftTrajectory picard_existence(const WeakTrajectory& weak, const ShrinkingCircle& sc,
                                 const PicardConfig& cfg, const CutoffProfiles& profiles) {
  if (cfg.truncation_k < 1 || cfg.max_iters < 1 || cfg.mesh_nodes < 3 || cfg.window < 1 ||
      !(cfg.fixed_point_tol > 0.0) || !(cfg.damping > 0.0 && cfg.damping <= 1.0)) {
    throw ArgumentError("picard_existence: invalid configuration");
  }
  const double t_max = cfg.t_max > 0.0 ? cfg.t_max : 2.0 * sc.extinction_time;
  const std::size_t nn = cfg.mesh_nodes;
  const double h = t_max / static_cast<double>(nn - 1);
  auto node_t = [&](std::size_t i) { return h * static_cast<double>(i); };

  std::vector<int> levels;
  if (cfg.truncation_k < 2) {
    levels.push_back(1);
  } else {
    for (int k = 2; k <= cfg.truncation_k; k *= 2) levels.push_back(k);
  }

  // Weak curves are fixed in time, so cache them per node.
  std::vector<std::optional<ClosedCurve>> weak_cache(nn);
  auto weak_at = [&](std::size_t i) -> const ClosedCurve& {
    if (!weak_cache[i]) weak_cache[i] = weak(node_t(i));
    return *weak_cache[i];
  };

  ShiftTrajectory out;
  std::vector<Y> prev;  // previous level's solution, used as a warm start
  double t_prev = 0.0;
  bool extinct = false;

  for (int k : levels) {
    const double cap = sc.extinction_time * (1.0 - 1.0 / k);
    auto F = [&](std::size_t i, const Y& y) {
      const ShiftedInterface si = capped_interface(sc, node_t(i), y.z, y.dil, cap);
      return shift_rhs_general(weak_at(i), si, profiles, cfg.rhs);
    };

    std::vector<Y> y(1);
    std::vector<ShiftRates> f;
    double t_k = t_max;
    std::size_t last = 0;  // last accepted node
    try {
      f.push_back(F(0, y[0]));
      std::size_t a = 0;
      bool hit_cap = false;
      while (a + 1 < nn && !hit_cap) {
        const std::size_t b = std::min(a + cfg.window, nn - 1);
        std::vector<Y> w(b - a + 1);
        w[0] = y[a];
        for (std::size_t i = a + 1; i <= b; ++i) w[i - a] = i < prev.size() ? prev[i] : w[i - a - 1];
        std::vector<ShiftRates> fw(b - a + 1);
        fw[0] = f[a];
        double res = std::numeric_limits<double>::infinity();
        int it = 0;
        for (; it < cfg.max_iters; ++it) {
          for (std::size_t i = a + 1; i <= b; ++i) fw[i - a] = F(i, w[i - a]);
          Y acc = w[0];
          res = 0.0;
          for (std::size_t i = a + 1; i <= b; ++i) {
            acc.z += (0.5 * h) * (fw[i - a - 1].zdot + fw[i - a].zdot);
            acc.dil += 0.5 * h * (fw[i - a - 1].tdot + fw[i - a].tdot);
            const Y& cur = w[i - a];
            res = std::max({res, norm(acc.z - cur.z), std::abs(acc.dil - cur.dil)});
            w[i - a].z = cur.z + cfg.damping * (acc.z - cur.z);
            w[i - a].dil = cur.dil + cfg.damping * (acc.dil - cur.dil);
          }
          if (!std::isfinite(res)) break;
          if (res <= cfg.fixed_point_tol) break;
        }
        if (!(res <= cfg.fixed_point_tol)) {
          throw ConvergenceError("picard_existence: no contraction on window starting at t = " +
                                     std::to_string(node_t(a)) + " (level k = " + std::to_string(k) + ")",
                                 res);
        }
        for (std::size_t i = a + 1; i <= b; ++i) {
          fw[i - a] = F(i, w[i - a]);
          const double T_prev = node_t(i - 1) + (i - 1 == a ? y[a].dil : w[i - a - 1].dil);
          const double T_i = node_t(i) + w[i - a].dil;
          if (T_i >= cap) {
            const double lam = (cap - T_prev) / (T_i - T_prev);
            t_k = node_t(i - 1) + lam * h;
            Y yc;
            const Y& y0 = (i - 1 == a) ? y[a] : w[i - a - 1];
            yc.z = y0.z + lam * (w[i - a].z - y0.z);
            yc.dil = y0.dil + lam * (w[i - a].dil - y0.dil);
            y.push_back(yc);
            f.push_back(fw[i - a]);
            hit_cap = true;
            break;
          }
          y.push_back(w[i - a]);
          f.push_back(fw[i - a]);
          last = i;
        }
        a = b;
      }
      if (!hit_cap) t_k = node_t(last);
    } catch (const ExtinctError&) {
      extinct = true;
      t_k = node_t(last);
    }

    // Glue: this level owns [t_{k-1}, t_k).
    for (std::size_t i = 0; i <= last; ++i) {
      const double ti = node_t(i);
      if (ti < t_prev || ti >= t_k) continue;
      const ShiftedInterface si = capped_interface(sc, ti, y[i].z, y[i].dil, cap);
      out.samples.push_back({ti, y[i].z, y[i].dil, si.radius(), f[i]});
    }
    if (y.size() > last + 1 && !extinct) {
      const Y& yc = y.back();
      const ShiftedInterface si = capped_interface(sc, t_k, yc.z, yc.dil, cap);
      if (k == levels.back()) out.samples.push_back({t_k, yc.z, yc.dil, si.radius(), f.back()});
    }
    out.level_times.push_back(t_k);
    out.levels.push_back(k);
    t_prev = std::max(t_prev, t_k);
    prev.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(last + 1));
    if (extinct) break;
  }
  out.horizon = *std::max_element(out.level_times.begin(), out.level_times.end());
  out.status = extinct ? ShiftStatus::extinct : ShiftStatus::reached_horizon;
  return out;
}

ShiftBoundsResult shift_bounds_check(const ShiftTrajectory& st, double r0, double T_ext, double E0) {
  if (!(E0 >= 0.0) || !(r0 > 0.0) || !(T_ext > 0.0)) throw ArgumentError("shift_bounds_check: bad arguments");
  ShiftBoundsResult res;
  res.bound = std::sqrt(E0 / r0);
  res.z_ratio = st.max_abs_z() / r0;
  res.T_ratio = st.max_abs_dilation() / T_ext;
  res.z_margin = res.bound - res.z_ratio;
  res.T_margin = res.bound - res.T_ratio;
  res.pass = res.z_margin >= 0.0 && res.T_margin >= 0.0;
  return res;
}

std::string to_string(ShiftStatus s) { return s == ShiftStatus::reached_horizon ? "reached_horizon" : "extinct"; }

void write_shift_csv(const ShiftTrajectory& st, std::ostream& os) {
  os << "t,z_x,z_y,T_dil,r_T\n" << std::setprecision(17);
  for (const auto& s : st.samples) {
    os << s.t << ',' << s.z.x << ',' << s.z.y << ',' << s.time_dilation << ',' << s.r_T << '\n';
  }
}

}  // namespace mcflab

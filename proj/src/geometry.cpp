#include "mcflab/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_map>

#include "mcflab/errors.hpp"

namespace mcflab {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

struct SegmentHit {
  double dist = 0.0;
  double u = 0.0;  // parameter along the segment
  Point2 foot;
};

SegmentHit project_onto_segment(const Point2& a, const Point2& b, const Point2& q) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  double u = len2 > 0.0 ? dot(q - a, ab) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  const Point2 foot = a + u * ab;
  return {norm(q - foot), u, foot};
}

double orient(const Point2& a, const Point2& b, const Point2& c) { return cross(b - a, c - a); }

bool segments_cross(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2) {
  const double o1 = orient(p1, p2, q1);
  const double o2 = orient(p1, p2, q2);
  const double o3 = orient(q1, q2, p1);
  const double o4 = orient(q1, q2, p2);
  return (o1 * o2 < 0.0) && (o3 * o4 < 0.0);
}

}  // namespace

ClosedCurve::ClosedCurve(std::vector<Point2> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 3) {
    throw MalformedCurveError("closed curve needs at least 3 samples, got " +
                              std::to_string(samples_.size()));
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Point2& p = samples_[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw MalformedCurveError("non-finite curve sample at index " + std::to_string(i));
    }
    const Point2& q = samples_[(i + 1) % samples_.size()];
    if (p.x == q.x && p.y == q.y) {
      throw MalformedCurveError("coincident consecutive samples at index " + std::to_string(i));
    }
  }
  if (signed_area(samples_) < 0.0) {
    std::reverse(samples_.begin(), samples_.end());
    reversed_ = true;
  }
}

const Point2& ClosedCurve::at_cyclic(std::ptrdiff_t i) const {
  const auto n = static_cast<std::ptrdiff_t>(samples_.size());
  return samples_[static_cast<std::size_t>(((i % n) + n) % n)];
}

double CircleDeviation::max() const {
  return std::max({length_dev, normal_dev, curvature_dev, curvature_grad_dev});
}

double signed_area(std::span<const Point2> pts) {
  double twice = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(pts[i], pts[(i + 1) % n]);
  return 0.5 * twice;
}

CurveMetrics curve_metrics(const ClosedCurve& curve) {
  CurveMetrics m;
  const std::size_t n = curve.size();
  for (std::size_t i = 0; i < n; ++i) m.length += norm(curve[(i + 1) % n] - curve[i]);
  m.area = signed_area(curve.samples());
  return m;
}

Point2 area_centroid(const ClosedCurve& curve) {
  const std::size_t n = curve.size();
  double a2 = 0.0;
  Point2 c;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = curve[i];
    const Point2& q = curve[(i + 1) % n];
    const double w = cross(p, q);
    a2 += w;
    c += w * (p + q);
  }
  return c / (3.0 * a2);
}

namespace {

struct ThreePoint {
  Point2 tangent;
  Point2 normal;
  double curvature;
  double h_minus;
  double h_plus;
};

ThreePoint three_point(const Point2& prev, const Point2& p, const Point2& next, std::size_t index) {
  const Point2 dm = p - prev;
  const Point2 dp = next - p;
  const double hm = norm(dm);
  const double hp = norm(dp);
  const Point2 chord = next - prev;
  const double chord_len = norm(chord);
  if (hm <= 0.0 || hp <= 0.0 || chord_len <= 1e-14 * std::max(hm, hp)) {
    throw DegenerateGeometryError("degenerate spacing around sample " + std::to_string(index));
  }
  ThreePoint out;
  out.tangent = chord / chord_len;
  out.normal = rotate_ccw(out.tangent);
  const Point2 xss = (2.0 / (hm + hp)) * (dp / hp - dm / hm);
  out.curvature = dot(xss, out.normal);
  out.h_minus = hm;
  out.h_plus = hp;
  return out;
}

}  // namespace

LocalFrame frame_at(const ClosedCurve& curve, std::size_t index) {
  if (index >= curve.size()) throw ArgumentError("frame index out of range");
  const auto i = static_cast<std::ptrdiff_t>(index);
  const ThreePoint c = three_point(curve.at_cyclic(i - 1), curve[index], curve.at_cyclic(i + 1), index);
  const ThreePoint l = three_point(curve.at_cyclic(i - 2), curve.at_cyclic(i - 1), curve[index], index);
  const ThreePoint r = three_point(curve[index], curve.at_cyclic(i + 1), curve.at_cyclic(i + 2), index);
  LocalFrame f;
  f.normal = c.normal;
  f.tangent = rotate_cw(c.normal);
  f.curvature = c.curvature;
  f.curvature_derivative = (r.curvature - l.curvature) / (c.h_minus + c.h_plus);
  return f;
}

std::vector<LocalFrame> frames(const ClosedCurve& curve) {
  const std::size_t n = curve.size();
  std::vector<ThreePoint> tp(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto si = static_cast<std::ptrdiff_t>(i);
    tp[i] = three_point(curve.at_cyclic(si - 1), curve[i], curve.at_cyclic(si + 1), i);
  }
  std::vector<LocalFrame> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ThreePoint& c = tp[i];
    out[i].normal = c.normal;
    out[i].tangent = rotate_cw(c.normal);
    out[i].curvature = c.curvature;
    out[i].curvature_derivative =
        (tp[(i + 1) % n].curvature - tp[(i + n - 1) % n].curvature) / (c.h_minus + c.h_plus);
  }
  return out;
}

double tubular_width(const ClosedCurve& curve) {
  const std::size_t n = curve.size();
  const CurveMetrics m = curve_metrics(curve);
  const double r = std::sqrt(m.area / kPi);
  double max_h = 0.0;
  for (const LocalFrame& f : frames(curve)) max_h = std::max(max_h, std::abs(f.curvature));
  const double rc = max_h > 0.0 ? 1.0 / max_h : std::numeric_limits<double>::infinity();
  double width = std::min(0.5 * r, rc);

  // Pairs of samples farther apart along the curve than a quarter turn of the
  // smallest curvature radius belong to different arcs.
  std::vector<double> s(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) s[i + 1] = s[i] + norm(curve[(i + 1) % n] - curve[i]);
  const double far = 0.5 * kPi * std::min(r, rc);
  double min_far = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double along = s[j] - s[i];
      if (std::min(along, m.length - along) <= far) continue;
      min_far = std::min(min_far, norm(curve[j] - curve[i]));
    }
  }
  return std::min(width, 0.5 * min_far);
}

int winding_number(const ClosedCurve& curve, const Point2& q) {
  int wn = 0;
  const std::size_t n = curve.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = curve[i];
    const Point2& b = curve[(i + 1) % n];
    if (a.y <= q.y) {
      if (b.y > q.y && orient(a, b, q) > 0.0) ++wn;
    } else {
      if (b.y <= q.y && orient(a, b, q) < 0.0) --wn;
    }
  }
  return wn;
}

TubularProjection signed_distance(const ClosedCurve& curve, const Point2& query) {
  return signed_distance(curve, query, tubular_width(curve));
}

TubularProjection signed_distance(const ClosedCurve& curve, const Point2& query, double tube_width) {
  const std::size_t n = curve.size();
  double max_edge = 0.0;
  SegmentHit best{std::numeric_limits<double>::infinity(), 0.0, {}};
  std::size_t best_k = 0;
  std::vector<SegmentHit> hits(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Point2& a = curve[k];
    const Point2& b = curve[(k + 1) % n];
    max_edge = std::max(max_edge, norm(b - a));
    hits[k] = project_onto_segment(a, b, query);
    if (hits[k].dist < best.dist) {
      best = hits[k];
      best_k = k;
    }
  }
  const double tol = 1e-9 * std::max(best.dist, max_edge);
  for (std::size_t k = 0; k < n; ++k) {
    if (hits[k].dist <= best.dist + tol && norm(hits[k].foot - best.foot) > 4.0 * max_edge) {
      throw AmbiguousProjectionError("query is equidistant from two separate arcs of the curve");
    }
  }

  TubularProjection out;
  out.foot = best.foot;
  const bool inside = winding_number(curve, query) != 0;
  out.sdist = best.dist == 0.0 ? 0.0 : (inside ? best.dist : -best.dist);

  const LocalFrame fa = frame_at(curve, best_k);
  const LocalFrame fb = frame_at(curve, (best_k + 1) % n);
  const Point2 edge = curve[(best_k + 1) % n] - curve[best_k];
  LocalFrame ff;
  ff.tangent = edge / norm(edge);
  ff.normal = rotate_ccw(ff.tangent);
  ff.curvature = (1.0 - best.u) * fa.curvature + best.u * fb.curvature;
  ff.curvature_derivative = (1.0 - best.u) * fa.curvature_derivative + best.u * fb.curvature_derivative;
  out.foot_frame = ff;
  out.valid = std::abs(out.sdist) < tube_width;
  return out;
}

CircleDeviation circle_closeness(const ClosedCurve& curve, double r) {
  if (!(r > 0.0)) throw ArgumentError("circle_closeness needs r > 0");
  const std::size_t n = curve.size();
  const std::vector<LocalFrame> fr = frames(curve);
  std::vector<double> s(n, 0.0);
  double length = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = length;
    length += norm(curve[(i + 1) % n] - curve[i]);
  }

  CircleDeviation dev;
  dev.length_dev = std::abs(length - 2.0 * kPi * r) / (2.0 * kPi * r);
  for (const LocalFrame& f : fr) {
    dev.curvature_dev = std::max(dev.curvature_dev, r * std::abs(f.curvature - 1.0 / r));
    dev.curvature_grad_dev = std::max(dev.curvature_grad_dev, r * r * std::abs(f.curvature_derivative));
  }

  // |n - (-e^{i 2 pi (theta - theta0) / L})| = 2 |sin((phase_i + c) / 2)| with c
  // set by the arc-length origin. The best origin centres the smallest arc
  // holding all phases, whose length is 2 pi minus the widest gap.
  double best = std::numeric_limits<double>::infinity();
  for (const double sign : {1.0, -1.0}) {
    std::vector<double> phase(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double psi = std::atan2(fr[i].normal.y, fr[i].normal.x);
      phase[i] = wrap_angle(psi - kPi - sign * 2.0 * kPi * s[i] / length);
    }
    std::sort(phase.begin(), phase.end());
    double gap = phase.front() + 2.0 * kPi - phase.back();
    for (std::size_t i = 1; i < n; ++i) gap = std::max(gap, phase[i] - phase[i - 1]);
    best = std::min(best, 0.5 * (2.0 * kPi - gap));
  }
  dev.normal_dev = 2.0 * std::sin(0.5 * best);
  return dev;
}

GraphFrame graph_frame(double r, double h, double hp, double hpp) {
  if (!(r > 0.0) || !(std::abs(h) < r)) throw ArgumentError("graph_frame needs |h| < r");
  const double q = 1.0 - h / r;
  const double d = q * q + hp * hp;
  if (d < 1e-14) throw DegenerateGeometryError("graph_frame: degenerate graph metric");
  const double sd = std::sqrt(d);
  GraphFrame g;
  g.normal_n = q / sd;
  g.normal_t = -hp / sd;
  g.curvature = (q * (1.0 / r + hpp - h / (r * r)) + 2.0 * hp * hp / r) / (d * sd);
  return g;
}

bool is_simple(const ClosedCurve& curve) {
  const std::size_t n = curve.size();
  double xmin = curve[0].x, xmax = curve[0].x, ymin = curve[0].y, ymax = curve[0].y;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xmin = std::min(xmin, curve[i].x);
    xmax = std::max(xmax, curve[i].x);
    ymin = std::min(ymin, curve[i].y);
    ymax = std::max(ymax, curve[i].y);
    total += norm(curve[(i + 1) % n] - curve[i]);
  }
  const double cell = std::max(2.0 * total / static_cast<double>(n), 1e-300);
  const auto nx = static_cast<long>(std::ceil((xmax - xmin) / cell)) + 1;
  const auto ny = static_cast<long>(std::ceil((ymax - ymin) / cell)) + 1;

  std::unordered_map<long, std::vector<std::size_t>> grid;
  grid.reserve(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const Point2& a = curve[k];
    const Point2& b = curve[(k + 1) % n];
    const long i0 = static_cast<long>((std::min(a.x, b.x) - xmin) / cell);
    const long i1 = static_cast<long>((std::max(a.x, b.x) - xmin) / cell);
    const long j0 = static_cast<long>((std::min(a.y, b.y) - ymin) / cell);
    const long j1 = static_cast<long>((std::max(a.y, b.y) - ymin) / cell);
    for (long i = i0; i <= std::min(i1, nx - 1); ++i)
      for (long j = j0; j <= std::min(j1, ny - 1); ++j) grid[i * ny + j].push_back(k);
  }
  for (const auto& [key, segs] : grid) {
    for (std::size_t p = 0; p < segs.size(); ++p) {
      for (std::size_t q = p + 1; q < segs.size(); ++q) {
        const std::size_t a = segs[p];
        const std::size_t b = segs[q];
        const std::size_t gap = a > b ? a - b : b - a;
        if (gap <= 1 || gap == n - 1) continue;
        if (segments_cross(curve[a], curve[(a + 1) % n], curve[b], curve[(b + 1) % n])) return false;
      }
    }
  }
  return true;
}

ClosedCurve sample_circle(Point2 center, double radius, std::size_t n, double phase) {
  if (!(radius > 0.0)) throw ArgumentError("circle radius must be positive");
  std::vector<Point2> pts(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = phase + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    pts[j] = center + radius * unit_from_angle(phi);
  }
  return ClosedCurve(std::move(pts));
}

ClosedCurve sample_ellipse(Point2 center, double a, double b, std::size_t n) {
  std::vector<Point2> pts(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    pts[j] = center + Point2{a * std::cos(t), b * std::sin(t)};
  }
  return ClosedCurve(std::move(pts));
}

}  // namespace mcflab

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace mcflab {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2& operator+=(const Point2& o) { x += o.x; y += o.y; return *this; }
  Point2& operator-=(const Point2& o) { x -= o.x; y -= o.y; return *this; }
  Point2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Point2 operator+(Point2 a, const Point2& b) { return a += b; }
inline Point2 operator-(Point2 a, const Point2& b) { return a -= b; }
inline Point2 operator-(const Point2& a) { return {-a.x, -a.y}; }
inline Point2 operator*(double s, Point2 a) { return a *= s; }
inline Point2 operator*(Point2 a, double s) { return a *= s; }
inline Point2 operator/(Point2 a, double s) { return a *= (1.0 / s); }
inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }
/// Counter-clockwise rotation by 90 degrees.
inline Point2 rotate_ccw(const Point2& a) { return {-a.y, a.x}; }
/// Clockwise rotation by 90 degrees (inverse of rotate_ccw).
inline Point2 rotate_cw(const Point2& a) { return {a.y, -a.x}; }
inline Point2 unit_from_angle(double phi) { return {std::cos(phi), std::sin(phi)}; }

/// Row-major 2x2 matrix; entry (i, j) holds d(component i)/d(x_j) for gradients.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

  double trace() const { return a11 + a22; }
  Point2 apply(const Point2& v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
};

inline Mat2 outer(const Point2& a, const Point2& b) {
  return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
}
inline Mat2 operator+(const Mat2& p, const Mat2& q) {
  return {p.a11 + q.a11, p.a12 + q.a12, p.a21 + q.a21, p.a22 + q.a22};
}
inline Mat2 operator*(double s, const Mat2& p) { return {s * p.a11, s * p.a12, s * p.a21, s * p.a22}; }

/// Closed polygon, stored positively oriented (enclosed region to the left).
///
/// Clockwise input is reversed on construction so that every downstream
/// formula can assume the inward normal is the ccw rotation of the tangent.
class ClosedCurve {
public:
  ClosedCurve() = default;
  explicit ClosedCurve(std::vector<Point2> samples);

  std::size_t size() const { return samples_.size(); }
  const Point2& operator[](std::size_t i) const { return samples_[i]; }
  const Point2& at_cyclic(std::ptrdiff_t i) const;
  std::span<const Point2> samples() const { return samples_; }
  /// True when the input had to be reversed to become positively oriented.
  bool was_reversed() const { return reversed_; }

private:
  std::vector<Point2> samples_;
  bool reversed_ = false;
};

struct LocalFrame {
  Point2 normal;   // inward unit normal
  Point2 tangent;  // unit tangent, equal to rotate_cw(normal)
  double curvature = 0.0;
  double curvature_derivative = 0.0;
};

struct TubularProjection {
  double sdist = 0.0;  // > 0 inside
  Point2 foot;
  LocalFrame foot_frame;
  bool valid = false;
};

struct CircleDeviation {
  double length_dev = 0.0;
  double normal_dev = 0.0;
  double curvature_dev = 0.0;
  double curvature_grad_dev = 0.0;

  double max() const;
};

struct CurveMetrics {
  double length = 0.0;
  double area = 0.0;
};

/// Normal of a graph over a circle, in the circle's (normal, tangent) frame.
struct GraphFrame {
  double normal_n = 0.0;
  double normal_t = 0.0;
  double curvature = 0.0;
};

CurveMetrics curve_metrics(const ClosedCurve& curve);
double signed_area(std::span<const Point2> pts);
Point2 area_centroid(const ClosedCurve& curve);

LocalFrame frame_at(const ClosedCurve& curve, std::size_t index);
/// All frames at once; curvature derivatives use neighbouring curvatures.
std::vector<LocalFrame> frames(const ClosedCurve& curve);

/// Width of a tubular neighbourhood on which nearest-point projection is
/// single valued: min(r/2, 1/max|H|, half the distance between far-apart arcs),
/// with r = sqrt(area / pi).
double tubular_width(const ClosedCurve& curve);

/// Winding number of the curve around q (1 inside, 0 outside for simple curves).
int winding_number(const ClosedCurve& curve, const Point2& q);

TubularProjection signed_distance(const ClosedCurve& curve, const Point2& query);
TubularProjection signed_distance(const ClosedCurve& curve, const Point2& query, double tube_width);

CircleDeviation circle_closeness(const ClosedCurve& curve, double r);

GraphFrame graph_frame(double r, double h, double hp, double hpp);

/// True when no two non-adjacent edges intersect.
bool is_simple(const ClosedCurve& curve);

/// Regular n-gon on a circle, first vertex at angle phase.
ClosedCurve sample_circle(Point2 center, double radius, std::size_t n, double phase = 0.0);
/// Ellipse with semi-axes (a, b), sampled uniformly in the angle parameter.
ClosedCurve sample_ellipse(Point2 center, double a, double b, std::size_t n);
/// Polar curve rho(phi) about center, sampled uniformly in phi.
template <class RadiusFn>
ClosedCurve sample_polar(Point2 center, RadiusFn&& radius, std::size_t n) {
  std::vector<Point2> pts(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
    pts[j] = center + radius(phi) * unit_from_angle(phi);
  }
  return ClosedCurve(std::move(pts));
}

}  // namespace mcflab

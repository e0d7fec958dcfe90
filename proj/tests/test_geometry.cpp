#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mcflab/curve_io.hpp"
#include "mcflab/errors.hpp"
#include "mcflab/geometry.hpp"

using namespace mcflab;

namespace {

constexpr double kPi = std::numbers::pi;

// Analytic ellipse curvature at parameter t.
double ellipse_curvature(double a, double b, double t) {
  const double s = std::sin(t), c = std::cos(t);
  return a * b / std::pow(a * a * s * s + b * b * c * c, 1.5);
}

}  // namespace

TEST_CASE("curve_metrics on regular polygons and the unit square") {
  const auto c = sample_circle({}, 1.0, 512);
  const auto m = curve_metrics(c);
  CHECK(std::abs(m.length - 2 * kPi) / (2 * kPi) < 1e-4);
  CHECK(std::abs(m.area - kPi) / kPi < 1e-4);

  const ClosedCurve sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(curve_metrics(sq).length == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(curve_metrics(sq).area == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(curve_metrics(sample_circle({}, 2.0, 512)).area == doctest::Approx(4 * kPi).epsilon(1e-4));
}

TEST_CASE("fewer than three samples is malformed") {
  CHECK_THROWS_AS(ClosedCurve({{0, 0}, {1, 0}}), MalformedCurveError);
}

TEST_CASE("clockwise input is reversed to positive orientation") {
  const ClosedCurve cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(cw.was_reversed());
  CHECK(curve_metrics(cw).area > 0.0);
}

TEST_CASE("frame_at on circles points inward with curvature 1/r") {
  for (double r : {1.0, 0.5}) {
    const auto c = sample_circle({}, r, 1024);
    for (std::size_t i : {0u, 100u, 511u, 1023u}) {
      const LocalFrame f = frame_at(c, i);
      CHECK(f.curvature == doctest::Approx(1.0 / r).epsilon(1e-3));
      const Point2 to_center = -c[i] / norm(c[i]);
      CHECK(dot(f.normal, to_center) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("frame_at on a 2:1 ellipse matches the analytic curvature") {
  const double a = 2.0, b = 1.0;
  const auto c = sample_ellipse({}, a, b, 2048);
  CHECK(c[0].x == doctest::Approx(2.0));
  CHECK(frame_at(c, 0).curvature == doctest::Approx(a / (b * b)).epsilon(1e-2));
  // Away from the vertex too.
  const std::size_t j = 300;
  const double t = 2 * kPi * j / 2048.0;
  CHECK(frame_at(c, j).curvature == doctest::Approx(ellipse_curvature(a, b, t)).epsilon(1e-2));
}

TEST_CASE("coincident neighbours are rejected") {
  CHECK_THROWS_AS(ClosedCurve({{0, 0}, {1, 0}, {1, 0}, {1, 1}, {0, 1}}), MalformedCurveError);
}

TEST_CASE("tangent is the clockwise rotation of the normal at every sample") {
  const auto c = sample_ellipse({0.3, -0.2}, 1.5, 0.7, 257);
  for (const LocalFrame& f : frames(c)) {
    const Point2 back = rotate_ccw(f.tangent);
    CHECK(back.x == f.normal.x);
    CHECK(back.y == f.normal.y);
  }
}

TEST_CASE("curvature, length and area converge at second order") {
  std::vector<double> ek, el, ea;
  const double a = 1.5, b = 0.8;
  for (std::size_t n : {256u, 512u, 1024u}) {
    // Equal parameter steps are not equal arc-length steps on the ellipse.
    const auto e = sample_ellipse({}, a, b, n);
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double t = 2 * kPi * j / n;
      err = std::max(err, std::abs(frame_at(e, j).curvature - ellipse_curvature(a, b, t)));
    }
    ek.push_back(err);

    // Irregular circle sampling; the phase jitter is a fixed fraction of the spacing.
    std::vector<Point2> pts(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double u = 2 * kPi * j / n;
      pts[j] = unit_from_angle(u + 0.3 * std::sin(u) * (2 * kPi / n));
    }
    const auto m = curve_metrics(ClosedCurve(pts));
    el.push_back(std::abs(m.length - 2 * kPi));
    ea.push_back(std::abs(m.area - kPi));
  }
  for (const auto* e : {&ek, &el, &ea}) {
    CHECK(std::log2((*e)[0] / (*e)[1]) >= 1.8);
    CHECK(std::log2((*e)[1] / (*e)[2]) >= 1.8);
  }
}

TEST_CASE("signed_distance on the unit circle") {
  const auto c = sample_circle({}, 1.0, 1024);
  const auto in = signed_distance(c, {0.5, 0.0});
  CHECK(in.sdist == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(in.foot.x == doctest::Approx(1.0).epsilon(1e-5));
  // The nearest point lies on a chord next to the vertex at (1, 0).
  CHECK(std::abs(in.foot.y) < kPi / 1024);

  const auto out = signed_distance(c, {2.0, 0.0});
  CHECK(out.sdist == doctest::Approx(-1.0).epsilon(1e-5));
  CHECK(out.foot.x == doctest::Approx(1.0).epsilon(1e-5));

  bool ambiguous = false;
  try {
    ambiguous = !signed_distance(c, {0.0, 0.0}).valid;
  } catch (const AmbiguousProjectionError&) {
    ambiguous = true;
  }
  CHECK(ambiguous);
}

TEST_CASE("signed distance has unit gradient inside the tube") {
  const auto c = sample_ellipse({}, 1.2, 0.9, 2048);
  const double h = 1e-5;
  for (const Point2 q : {Point2{1.1, 0.05}, Point2{0.2, 0.85}, Point2{-0.9, -0.4}, Point2{0.5, -0.95}}) {
    const auto p = signed_distance(c, q);
    REQUIRE(p.valid);
    const double gx = (signed_distance(c, q + Point2{h, 0}).sdist - signed_distance(c, q - Point2{h, 0}).sdist) / (2 * h);
    const double gy = (signed_distance(c, q + Point2{0, h}).sdist - signed_distance(c, q - Point2{0, h}).sdist) / (2 * h);
    CHECK(std::hypot(gx, gy) == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("circle_closeness examples") {
  for (double r : {0.3, 1.0, 2.5}) {
    const auto d = circle_closeness(sample_circle({1, -2}, r, 1024), r);
    CHECK(d.max() <= 5e-3);
  }
  const auto big = circle_closeness(sample_circle({}, 1.1, 1024), 1.0);
  CHECK(big.length_dev == doctest::Approx(0.1).epsilon(1e-2));

  // rho = 1 + eps cos 2 phi has curvature 1 - 3 eps cos 2 phi to first order.
  const double eps = 0.05;
  const auto polar = sample_polar({}, [&](double phi) { return 1.0 + eps * std::cos(2 * phi); }, 2048);
  const auto dp = circle_closeness(polar, 1.0);
  CHECK(dp.curvature_dev == doctest::Approx(3 * eps).epsilon(0.1));

  CHECK_THROWS_AS(circle_closeness(sample_circle({}, 1, 64), 0.0), ArgumentError);
}

TEST_CASE("circle_closeness of matching circles is at most 10/N") {
  for (std::size_t n : {64u, 256u, 1024u}) {
    const auto d = circle_closeness(sample_circle({0.2, 0.1}, 0.7, n, 0.37), 0.7);
    CHECK(d.length_dev <= 10.0 / n);
    CHECK(d.normal_dev <= 10.0 / n);
    CHECK(d.curvature_dev <= 10.0 / n);
    CHECK(d.curvature_grad_dev <= 10.0 / n);
  }
}

TEST_CASE("normal_dev does not depend on the starting sample or orientation") {
  const auto e = sample_ellipse({}, 1.0, 0.9, 512);
  std::vector<Point2> rolled(e.samples().begin(), e.samples().end());
  std::rotate(rolled.begin(), rolled.begin() + 77, rolled.end());
  std::vector<Point2> reversed(rolled.rbegin(), rolled.rend());
  const double base = circle_closeness(e, 0.95).normal_dev;
  CHECK(circle_closeness(ClosedCurve(rolled), 0.95).normal_dev == doctest::Approx(base).epsilon(1e-12));
  CHECK(circle_closeness(ClosedCurve(reversed), 0.95).normal_dev == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("graph_frame identities") {
  const auto g0 = graph_frame(1.0, 0.0, 0.0, 0.0);
  CHECK(g0.normal_n == 1.0);
  CHECK(g0.normal_t == 0.0);
  CHECK(g0.curvature == 1.0);
  CHECK(graph_frame(2.5, 0.0, 0.0, 0.0).curvature == 1.0 / 2.5);

  CHECK(graph_frame(1.0, 0.01, 0.0, -0.04).curvature == doctest::Approx(0.9697).epsilon(1e-3));

  const auto g2 = graph_frame(2.0, 0.0, 0.1, 0.0);
  CHECK(std::hypot(g2.normal_n, g2.normal_t) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g2.curvature == doctest::Approx((0.5 + 2 * 0.01 / 2) / std::pow(1.01, 1.5)).epsilon(1e-14));

  CHECK_THROWS_AS(graph_frame(1.0, 1.0, 0.0, 0.0), ArgumentError);
}

TEST_CASE("graph_frame curvature agrees with the polar curvature of the same curve") {
  // rho(phi) = r - h(phi), h = a cos 3 phi; polar curvature oracle.
  const double r = 1.3, a = 0.05;
  for (double phi : {0.0, 0.4, 1.1, 2.0}) {
    const double h = a * std::cos(3 * phi);
    const double hphi = -3 * a * std::sin(3 * phi);
    const double hphiphi = -9 * a * std::cos(3 * phi);
    const double rho = r - h, rp = -hphi, rpp = -hphiphi;
    const double k_polar = (rho * rho + 2 * rp * rp - rho * rpp) / std::pow(rho * rho + rp * rp, 1.5);
    const auto g = graph_frame(r, h, hphi / r, hphiphi / (r * r));
    CHECK(g.curvature == doctest::Approx(k_polar).epsilon(1e-12));
  }
}

TEST_CASE("winding number and simplicity") {
  const auto c = sample_circle({}, 1.0, 64);
  CHECK(winding_number(c, {0, 0}) == 1);
  CHECK(winding_number(c, {2, 0}) == 0);
  CHECK(is_simple(c));
  const ClosedCurve bow({{0, 0}, {1, 1}, {1, 0}, {0, 1}});
  CHECK_FALSE(is_simple(bow));
}

TEST_CASE("tubular width of a circle is r/2") {
  CHECK(tubular_width(sample_circle({}, 2.0, 256)) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("curve CSV round trip") {
  const auto c = sample_ellipse({0.1, 0.2}, 1.0, 0.5, 33);
  std::stringstream ss;
  write_curve_csv(ss, c);
  const auto back = read_curve_csv(ss);
  REQUIRE(back.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(back[i].x == c[i].x);
    CHECK(back[i].y == c[i].y);
  }
  std::stringstream bad("x,y\n1,2\nfoo,3\n");
  CHECK_THROWS_AS(read_curve_csv(bad), MalformedCurveError);
}

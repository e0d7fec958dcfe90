#pragma once

#include <cstddef>

#include "mcflab/geometry.hpp"

namespace mcflab {

/// Self-similarly shrinking circle r(t) = sqrt(2 (T_ext - t)) about a fixed center.
struct ShrinkingCircle {
  double extinction_time = 0.5;
  Point2 center{};

  static ShrinkingCircle from_initial_radius(double r0, Point2 center = {});
  double initial_radius() const;
};

/// Dynamic space-time shift: translation z and time dilation T(t) - t.
struct ShiftState {
  Point2 z{};
  double time_dilation = 0.0;
  double t = 0.0;

  double shifted_time() const { return t + time_dilation; }
};

struct ShiftedInterface {
  ShrinkingCircle circle;
  ShiftState shift;

  /// r_T(t) = r(T(t)); throws ExtinctError at or past extinction.
  double radius() const;
  Point2 center() const { return circle.center + shift.z; }
};

double radius_at(const ShrinkingCircle& sc, double tau);
ClosedCurve shifted_circle(const ShiftedInterface& si, std::size_t n);
double extinction_time_from_area(double area);

}  // namespace mcflab

#include "mcflab/strong_solution.hpp"

#include <cmath>
#include <numbers>

#include "mcflab/errors.hpp"

namespace mcflab {

ShrinkingCircle ShrinkingCircle::from_initial_radius(double r0, Point2 center) {
  if (!(r0 > 0.0)) throw ArgumentError("initial radius must be positive");
  return {0.5 * r0 * r0, center};
}

double ShrinkingCircle::initial_radius() const { return std::sqrt(2.0 * extinction_time); }

double ShiftedInterface::radius() const { return radius_at(circle, shift.shifted_time()); }

double radius_at(const ShrinkingCircle& sc, double tau) {
  if (!(sc.extinction_time > 0.0)) throw ArgumentError("extinction time must be positive");
  if (tau < 0.0) throw ArgumentError("radius_at: negative time");
  if (tau >= sc.extinction_time) throw ExtinctError("radius_at: circle is extinct at this time");
  return std::sqrt(2.0 * (sc.extinction_time - tau));
}

ClosedCurve shifted_circle(const ShiftedInterface& si, std::size_t n) {
  return sample_circle(si.center(), si.radius(), n);
}

double extinction_time_from_area(double area) {
  if (!(area > 0.0)) throw ArgumentError("extinction_time_from_area needs a positive area");
  // dA/dt = -2 pi for any closed embedded curve under curve shortening flow.
  return area / (2.0 * std::numbers::pi);
}

}  // namespace mcflab

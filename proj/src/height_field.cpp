#include "mcflab/height_field.hpp"

#include <cmath>
#include <string>

#include "mcflab/errors.hpp"

namespace mcflab {

HeightField::HeightField(std::vector<double> v) : values(std::move(v)) {
  const std::size_t n = values.size();
  if (n < 32 || (n & (n - 1)) != 0) {
    throw ArgumentError("height field size must be a power of two >= 32, got " + std::to_string(n));
  }
  for (double x : values) {
    if (!std::isfinite(x)) throw ArgumentError("height field has a non-finite sample");
  }
}

double HeightField::max_abs() const {
  double m = 0.0;
  for (double x : values) m = std::max(m, std::abs(x));
  return m;
}

ClosedCurve graph_curve(const HeightField& h, const ShiftedInterface& si) {
  const double r = si.radius();
  const Point2 c = si.center();
  const std::size_t n = h.size();
  std::vector<Point2> pts(n);
  for (std::size_t j = 0; j < n; ++j) {
    pts[j] = c + (r - h[j]) * unit_from_angle(HeightField::angle(j, n));
  }
  return ClosedCurve(std::move(pts));
}

}  // namespace mcflab

#pragma once

#include <cstddef>
#include <vector>

#include "mcflab/geometry.hpp"
#include "mcflab/strong_solution.hpp"

namespace mcflab {

/// Periodic samples h(phi_j), phi_j = 2 pi j / N, of a graph over a circle,
/// measured along the inward normal -(cos phi, sin phi).
struct HeightField {
  std::vector<double> values;

  HeightField() = default;
  /// Requires N >= 32, a power of two, and finite samples.
  explicit HeightField(std::vector<double> v);

  template <class Fn>
  static HeightField from_function(std::size_t n, Fn&& fn) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = fn(angle(j, n));
    return HeightField(std::move(v));
  }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t j) const { return values[j]; }
  double max_abs() const;

  static double angle(std::size_t j, std::size_t n) {
    return 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
  }
};

/// Inward normal of the reference circle at angle phi.
inline Point2 circle_normal(double phi) { return -unit_from_angle(phi); }

/// Polygon with vertices z + (r_T - h_j)(cos phi_j, sin phi_j).
ClosedCurve graph_curve(const HeightField& h, const ShiftedInterface& si);

}  // namespace mcflab

#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "mcflab/geometry.hpp"

namespace mcflab {

struct MarkerCurve {
  ClosedCurve curve;
  std::size_t last_redistribution_step = 0;
  std::size_t step_count = 0;
};

struct FTConfig {
  std::size_t N = 1024;
  double cfl = 0.4;
  /// Spacing is checked every resample_every steps; markers are redistributed
  /// only when max/min spacing exceeds resample_ratio, since each spline
  /// resample perturbs the enclosed area slightly.
  std::size_t resample_every = 200;
  double resample_ratio = 2.0;
  double stop_area = 0.05;
  /// Self-intersection test cadence inside run_ft (ft_step always checks).
  std::size_t simple_check_every = 100;
  /// Number of snapshots, spaced uniformly in enclosed area.
  std::size_t snapshots = 60;
};

double min_spacing(const ClosedCurve& curve);
/// Largest over smallest marker spacing.
double spacing_ratio(const ClosedCurve& curve);

/// One Heun (two-stage explicit) step of curve shortening flow with tangential
/// redistribution. Rejects dt > cfl * (min spacing)^2.
MarkerCurve ft_step(const MarkerCurve& mc, double dt, double cfl = 0.4);

/// N markers equidistributed in arc length of the periodic cubic spline
/// through the current markers (chord-length parametrization).
MarkerCurve resample(const MarkerCurve& mc, std::size_t N);

/// Arc length of the periodic cubic spline through the markers.
double spline_length(const ClosedCurve& curve);

bool is_convex(const ClosedCurve& curve);

struct FTSnapshot {
  double t = 0.0;
  MarkerCurve mc;
  double area = 0.0;
  double length = 0.0;
  Point2 centroid;
  double r_ref = 0.0;
  CircleDeviation dev;
  bool convex = false;
};

struct FTResult {
  std::vector<FTSnapshot> snapshots;
  double extinction_estimate = 0.0;
  /// First snapshot time at which the curve is convex, -1 if never.
  double convexity_onset = -1.0;
  std::size_t steps = 0;
};

FTResult run_ft(const MarkerCurve& initial, const FTConfig& cfg);

/// Manifest rows (t, area, length, centroid, deviations) for a run.
nlohmann::json ft_manifest(const FTResult& res);

}  // namespace mcflab

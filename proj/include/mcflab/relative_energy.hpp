#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mcflab/calibration.hpp"
#include "mcflab/geometry.hpp"
#include "mcflab/height_field.hpp"
#include "mcflab/strong_solution.hpp"

namespace mcflab {

/// Signed thickness of the phase mismatch along each inward normal ray of the
/// shifted circle. Samples sit at phi_j = 2 pi j / M.
struct ErrorHeights {
  std::vector<double> rho_plus;
  std::vector<double> rho_minus;
  std::vector<double> rho;
};

/// Orthonormal Fourier coefficients; b[0] is unused and kept at zero.
struct ModeSpectrum {
  std::vector<double> a;
  std::vector<double> b;

  std::size_t max_mode() const { return a.empty() ? 0 : a.size() - 1; }
  /// sum over k of (1 + k^2)(a_k^2 + b_k^2) / (2 r).
  double energy(double r_T) const;
};

enum class TimeLabel { regular, non_regular };

struct TimeClass {
  TimeLabel label = TimeLabel::regular;
  double threshold = 0.0;
  double measured_dissipation = 0.0;
};

struct PerturbativeEnergy {
  double e_bulk_approx = 0.0;
  double e_int_approx = 0.0;

  double total() const { return e_bulk_approx + e_int_approx; }
};

struct StabilityRhs {
  double R_lot = 0.0;
  double R_lot_frozen = 0.0;
  std::vector<std::pair<std::string, double>> terms;
};

struct EnergyBreakdown {
  double e_int = 0.0;
  double e_bulk = 0.0;
  double e_total = 0.0;
  double dissipation = 0.0;
  double perturbative_e_int = 0.0;
  double perturbative_e_bulk = 0.0;
  ModeSpectrum modes;
};

ErrorHeights error_heights(const ClosedCurve& weak, const ShiftedInterface& si,
                           const CutoffProfiles& profiles, std::size_t M);

/// Height of the weak curve over the shifted circle along M radial rays (the
/// crossing closest to the circle), without any cutoff.
std::vector<double> graph_heights(const ClosedCurve& weak, const ShiftedInterface& si, std::size_t M);

double e_int(const ClosedCurve& weak, const ShiftedInterface& si, const CutoffProfiles& profiles);

/// Bulk error by radial slicing about the circle center. rays = 0 picks 4N.
double e_bulk(const ClosedCurve& weak, const ShiftedInterface& si, const CutoffProfiles& profiles,
              std::size_t rays = 0);

PerturbativeEnergy perturbative_energy(const HeightField& h, double r_T);

/// Requires K <= N/2 - 1.
ModeSpectrum mode_spectrum(const HeightField& h, std::size_t K);

TimeClass classify_time(double dissipation, double r_T, double Lambda);
double curve_dissipation(const ClosedCurve& weak);
double graph_dissipation(const HeightField& h, double r_T);
TimeClass dissipation_and_classify(const ClosedCurve& weak, double r_T, double Lambda);
TimeClass dissipation_and_classify(const HeightField& h, double r_T, double Lambda);

/// Leading-order right hand side of the relative energy inequality for a graph
/// over a circle, in variable-coefficient and frozen-coefficient form.
StabilityRhs stability_rhs(const HeightField& h, double r_T, const Point2& zdot, double tdot);

struct BreakdownOptions {
  bool exact = true;          // evaluate e_int / e_bulk on the polygon
  std::size_t modes = 8;
  std::size_t bulk_rays = 0;  // 0 picks one ray per vertex
};

EnergyBreakdown energy_breakdown(const HeightField& h, const ShiftedInterface& si,
                                 const CutoffProfiles& profiles, const BreakdownOptions& opts = {});

}  // namespace mcflab

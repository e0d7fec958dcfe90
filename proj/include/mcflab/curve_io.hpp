#pragma once

#include <filesystem>
#include <iosfwd>

#include "mcflab/geometry.hpp"

namespace mcflab {

/// Curves travel as CSV: an `x,y` header, then one row per sample. The
/// closing edge back to the first sample is implicit.
void write_curve_csv(std::ostream& out, const ClosedCurve& curve);
void write_curve_csv(const std::filesystem::path& path, const ClosedCurve& curve);
ClosedCurve read_curve_csv(std::istream& in);
ClosedCurve read_curve_csv(const std::filesystem::path& path);

}  // namespace mcflab

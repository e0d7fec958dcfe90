#include "mcflab/curve_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "mcflab/errors.hpp"

namespace mcflab {

void write_curve_csv(std::ostream& out, const ClosedCurve& curve) {
  out << "x,y\n" << std::setprecision(17);
  for (const Point2& p : curve.samples()) out << p.x << ',' << p.y << '\n';
}

void write_curve_csv(const std::filesystem::path& path, const ClosedCurve& curve) {
  std::ofstream out(path);
  if (!out) throw ReportError("cannot open " + path.string() + " for writing");
  write_curve_csv(out, curve);
}

ClosedCurve read_curve_csv(std::istream& in) {
  std::vector<Point2> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && (line[0] == 'x' || line[0] == 'X')) continue;
    std::istringstream row(line);
    Point2 p;
    char comma = 0;
    if (!(row >> p.x >> comma >> p.y) || comma != ',') {
      throw MalformedCurveError("bad curve CSV row " + std::to_string(lineno) + ": " + line);
    }
    pts.push_back(p);
  }
  return ClosedCurve(std::move(pts));
}

ClosedCurve read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ReportError("cannot open " + path.string());
  return read_curve_csv(in);
}

}  // namespace mcflab

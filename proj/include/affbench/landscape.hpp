#pragma once

// log10-scaled value grids of 2-D combined problems over [-5, 5]^2.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "affbench/combine.hpp"
#include "affbench/error.hpp"
#include "affbench/format.hpp"

namespace affbench {

struct LandscapeGrid {
  int resolution = 201;
  double lower = -kDomainBound;
  double upper = kDomainBound;
  std::vector<double> values;  // row-major: values[iy * resolution + ix]
  Vector optimum;
  std::vector<Vector> overlay;

  double coordinate(int i) const { return lower + (upper - lower) * i / (resolution - 1); }
  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * resolution + ix]; }
};

inline LandscapeGrid landscape_grid(const CombinedProblem& problem, int resolution = 201) {
  if (problem.dimension() != 2) throw ConfigError("landscape grids need a 2-dimensional problem");
  if (resolution < 2) throw ConfigError("landscape resolution must be >= 2");
  LandscapeGrid g;
  g.resolution = resolution;
  g.optimum = problem.optimum_location();
  g.values.resize(static_cast<std::size_t>(resolution) * resolution);
  Vector x(2);
  for (int iy = 0; iy < resolution; ++iy) {
    x[1] = g.coordinate(iy);
    for (int ix = 0; ix < resolution; ++ix) {
      x[0] = g.coordinate(ix);
      g.values[static_cast<std::size_t>(iy) * resolution + ix] = std::log10(problem(x));
    }
  }
  return g;
}

/// Writes `# optimum`, optional `# best` lines, then `x,y,log10_value` rows.
inline void write_landscape(const LandscapeGrid& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# optimum: " << format_real(g.optimum[0]) << ' ' << format_real(g.optimum[1]) << '\n';
  for (const auto& p : g.overlay) out << "# best: " << format_real(p[0]) << ' ' << format_real(p[1]) << '\n';
  out << "x,y,log10_value\n";
  for (int iy = 0; iy < g.resolution; ++iy)
    for (int ix = 0; ix < g.resolution; ++ix)
      out << format_real(g.coordinate(ix)) << ',' << format_real(g.coordinate(iy)) << ',' << format_real(g.at(ix, iy))
          << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::string landscape_file_name(int f1, int f2, int i1, double alpha) {
  return "landscape_f" + std::to_string(f1) + "_f" + std::to_string(f2) + "_i" + std::to_string(i1) + "_a" +
         format_alpha(alpha) + ".csv";
}

}  // namespace affbench

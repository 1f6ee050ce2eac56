#ifndef TRIPANEL_CSV_HPP
#define TRIPANEL_CSV_HPP

#include <cstdio>
#include <ostream>
#include <string>

#include "tripanel/solver.hpp"

namespace tripanel {

/// Full-precision float formatting for CSV output (17 significant digits).
inline std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Element table of a solved (or unsolved) plate system: vertices,
/// centroid, area, and charge density.
inline void export_mesh_csv(std::ostream& os, const BemSystem& sys) {
  os << "# tripanel mesh v1\n";
  os << "element,v0x,v0y,v0z,v1x,v1y,v1z,v2x,v2y,v2z,cx,cy,cz,area,sigma\n";
  for (size_t j = 0; j < sys.mesh.elements.size(); ++j) {
    const auto v = sys.mesh.elements[j].vertices();
    const Vec3 c = sys.mesh.collocationPoints[j];
    const double sigma = j < sys.solution.size() ? sys.solution[j] : 0.0;
    os << j;
    for (const Vec3& p : v) {
      os << ',' << csv_num(p.x) << ',' << csv_num(p.y) << ',' << csv_num(p.z);
    }
    os << ',' << csv_num(c.x) << ',' << csv_num(c.y) << ',' << csv_num(c.z) << ','
       << csv_num(sys.mesh.elements[j].area()) << ',' << csv_num(sigma) << '\n';
  }
}

/// Raw influence matrix dump for debugging small systems.
inline void export_matrix_csv(std::ostream& os, const DenseMatrix& m) {
  os << "# tripanel matrix v1\n";
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) {
      os << (j ? "," : "") << csv_num(m.at(i, j));
    }
    os << '\n';
  }
}

}  // namespace tripanel

#endif

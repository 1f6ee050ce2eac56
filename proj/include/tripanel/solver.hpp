#ifndef TRIPANEL_SOLVER_HPP
#define TRIPANEL_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tripanel/eval.hpp"
#include "tripanel/geometry.hpp"
#include "tripanel/vec3.hpp"

// Dense collocation solver for the unit square conducting plate held at
// unit potential: mesh of right triangles, influence matrix from the
// robust evaluation layer, LU solve, capacitance and corner charge-density
// diagnostics. The kernel normalization Phi = integral sigma / r dA makes
// sum(sigma_j area_j) directly the capacitance over 4 pi eps0.

namespace tripanel {

struct PlateMesh {
  int n = 0;  // squares per side; 2 n^2 triangles
  std::vector<PanelElement> elements;
  std::vector<Vec3> collocationPoints;  // element centroids

  double squareSize() const { return 1.0 / n; }
};

struct DenseMatrix {
  int n = 0;
  std::vector<double> a;  // row-major

  explicit DenseMatrix(int size = 0) : n(size), a(static_cast<size_t>(size) * size) {}
  double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

struct BemSystem {
  PlateMesh mesh;
  DenseMatrix matrix;
  std::vector<double> rhs;
  std::vector<double> solution;
  double residualNorm = 0.0;
};

struct CapacitanceReport {
  int n = 0;
  int nElements = 0;
  double capOver4PiEps0 = 0.0;
  double residualNorm = 0.0;
};

struct CornerProfile {
  std::vector<std::pair<double, double>> samples;  // (r, sigma), sorted by r
  double fitSlope = 0.0;                           // of log sigma = a - s log r
  double fitIntercept = 0.0;
  std::pair<double, double> fitWindow{0.0, 0.0};
};

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tiles [0,1]^2 (in the global xy plane, panels normal to z) with n x n
/// squares, each split along the same diagonal into two unit-ratio right
/// triangles.
inline PlateMesh mesh_unit_plate(int n, bool mirrored = false) {
  PlateMesh mesh;
  mesh.n = n;
  mesh.elements.reserve(2 * n * n);
  mesh.collocationPoints.reserve(2 * n * n);
  const double h = 1.0 / n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec3 c00{i * h, j * h, 0.0};
      const Vec3 c10{(i + 1) * h, j * h, 0.0};
      const Vec3 c01{i * h, (j + 1) * h, 0.0};
      const Vec3 c11{(i + 1) * h, (j + 1) * h, 0.0};
      const auto halves = mirrored ? split_rectangle(c10, c01 - c00, -(c10 - c00))
                                   : split_rectangle(c00, c10 - c00, c01 - c00);
      for (const TriangleVertices& t : {halves.first, halves.second}) {
        auto [prim, frame] = frame_from_right_triangle(t[0], t[1], t[2]);
        PanelElement e{prim, frame, 1.0};
        mesh.collocationPoints.push_back(e.centroid());
        mesh.elements.push_back(std::move(e));
      }
    }
  }
  return mesh;
}

/// Fills the collocation matrix A_ij = potential at centroid i from unit
/// density on element j, and the unit-volt right-hand side.
inline BemSystem assemble(PlateMesh mesh, const EvalPolicy& policy = {}) {
  const int m = static_cast<int>(mesh.elements.size());
  BemSystem sys;
  sys.matrix = DenseMatrix(m);
  sys.rhs.assign(m, 1.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      try {
        sys.matrix.at(i, j) =
            influence(mesh.elements[j], mesh.collocationPoints[i], policy).potential;
      } catch (const UnresolvableEvaluation& e) {
        throw UnresolvableEvaluation("assemble entry (" + std::to_string(i) + "," +
                                     std::to_string(j) + "): " + e.what());
      }
    }
  }
  sys.mesh = std::move(mesh);
  return sys;
}

/// Dense LU with scaled partial pivoting and forward/back substitution.
/// Returns the solution and the max-norm residual of the original system.
inline std::pair<std::vector<double>, double> solve_crout(
    const DenseMatrix& matrix, const std::vector<double>& rhs) {
  const int n = matrix.n;
  DenseMatrix lu = matrix;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  std::vector<double> rowMax(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) rowMax[i] = std::max(rowMax[i], std::abs(lu.at(i, j)));
    if (rowMax[i] == 0.0) throw SingularMatrix("solve_crout: zero row");
  }

  for (int k = 0; k < n; ++k) {
    int pivot = k;
    double best = std::abs(lu.at(k, k)) / rowMax[k];
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(lu.at(i, k)) / rowMax[i];
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (pivot != k) {
      for (int j = 0; j < n; ++j) std::swap(lu.at(k, j), lu.at(pivot, j));
      std::swap(rowMax[k], rowMax[pivot]);
      std::swap(perm[k], perm[pivot]);
    }
    const double pk = lu.at(k, k);
    if (std::abs(pk) < 1e-14 * rowMax[k]) {
      throw SingularMatrix("solve_crout: pivot below threshold at step " +
                           std::to_string(k));
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = lu.at(i, k) / pk;
      lu.at(i, k) = f;
      const double* rk = &lu.a[static_cast<size_t>(k) * n];
      double* ri = &lu.a[static_cast<size_t>(i) * n];
      for (int j = k + 1; j < n; ++j) ri[j] -= f * rk[j];
    }
  }

  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = rhs[perm[i]];
  for (int i = 1; i < n; ++i) {
    double s = x[i];
    const double* ri = &lu.a[static_cast<size_t>(i) * n];
    for (int j = 0; j < i; ++j) s -= ri[j] * x[j];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    const double* ri = &lu.a[static_cast<size_t>(i) * n];
    for (int j = i + 1; j < n; ++j) s -= ri[j] * x[j];
    x[i] = s / ri[i];
  }

  double resid = 0.0;
  for (int i = 0; i < n; ++i) {
    double ax = 0.0;
    const double* ri = &matrix.a[static_cast<size_t>(i) * n];
    for (int j = 0; j < n; ++j) ax += ri[j] * x[j];
    resid = std::max(resid, std::abs(ax - rhs[i]));
  }
  return {std::move(x), resid};
}

/// Solves the assembled system in place.
inline void solve(BemSystem& sys) {
  auto [x, resid] = solve_crout(sys.matrix, sys.rhs);
  sys.solution = std::move(x);
  sys.residualNorm = resid;
}

inline CapacitanceReport capacitance(const BemSystem& sys) {
  CapacitanceReport rep;
  rep.n = sys.mesh.n;
  rep.nElements = static_cast<int>(sys.mesh.elements.size());
  rep.residualNorm = sys.residualNorm;
  double q = 0.0;
  for (size_t j = 0; j < sys.solution.size(); ++j) {
    q += sys.solution[j] * sys.mesh.elements[j].area();
  }
  rep.capOver4PiEps0 = q;
  return rep;
}

/// Charge density along the diagonal band from the plate corner (0,0):
/// elements whose centroids sit on the corner diagonal, paired as
/// (distance from corner, sigma), with a log-log least squares fit over
/// the window 0 < r <= window.second (rMin = window.first).
inline CornerProfile corner_profile(const BemSystem& sys,
                                    std::pair<double, double> window) {
  CornerProfile prof;
  const double h = sys.mesh.squareSize();
  for (size_t j = 0; j < sys.mesh.elements.size(); ++j) {
    const Vec3 c = sys.mesh.collocationPoints[j];
    if (std::abs(c.x - c.y) < 0.5 * h) {
      prof.samples.emplace_back(std::hypot(c.x, c.y), sys.solution[j]);
    }
  }
  std::sort(prof.samples.begin(), prof.samples.end());
  prof.fitWindow = window;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& [r, sigma] : prof.samples) {
    if (r < window.first || r > window.second) continue;
    const double lx = std::log(r);
    const double ly = std::log(sigma);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 4) {
    throw InsufficientSamples("corner_profile: fewer than 4 samples in window");
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  prof.fitSlope = -slope;  // sigma ~ r^{-s}, report s > 0
  prof.fitIntercept = (sy - slope * sx) / m;
  return prof;
}

/// Potential and flux at a point by superposition of the solved densities.
inline std::pair<double, Vec3> field_at(const BemSystem& sys, const Vec3& p,
                                        const EvalPolicy& policy = {}) {
  double pot = 0.0;
  Vec3 flux;
  for (size_t j = 0; j < sys.mesh.elements.size(); ++j) {
    const InfluenceResult r = influence(sys.mesh.elements[j], p, policy);
    pot += sys.solution[j] * r.potential;
    flux += r.flux * sys.solution[j];
  }
  return {pot, flux};
}

}  // namespace tripanel

#endif

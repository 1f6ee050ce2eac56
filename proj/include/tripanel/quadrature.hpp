#ifndef TRIPANEL_QUADRATURE_HPP
#define TRIPANEL_QUADRATURE_HPP

#include <cmath>
#include <map>
#include <vector>

#include "tripanel/vec3.hpp"

// Brute-force evaluation of the defining surface integral over the
// normalized triangle and its gradient: the validation oracle and the
// runtime fallback behind the closed forms. An nx-by-nz grid on the unit
// square is mapped onto the triangle by the upper limit z(x) = zM (1 - x);
// midpoint cells are weighted by their true sub-area, Gauss-Legendre nodes
// by the Jacobian zM (1 - x).

namespace tripanel {

enum class QuadratureRule { Midpoint, GaussLegendre };

struct QuadratureSpec {
  int nx = 10;
  int nz = 10;
  QuadratureRule rule = QuadratureRule::GaussLegendre;
};

enum class QuadStatus { Ok, NodeCollision, NoConvergence };

struct QuadResult {
  double potential = 0.0;
  Vec3 flux;
  QuadStatus status = QuadStatus::Ok;

  bool ok() const { return status == QuadStatus::Ok; }
};

struct OracleResult {
  double potential = 0.0;
  Vec3 flux;
  int refinementLevels = 0;
  double estimatedError = 0.0;
  QuadStatus status = QuadStatus::Ok;

  bool ok() const { return status == QuadStatus::Ok; }
};

namespace detail {

struct Rule1d {
  std::vector<double> node;    // on [0, 1]
  std::vector<double> weight;  // sums to 1
};

/// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
inline Rule1d gauss_legendre_01(int n) {
  Rule1d r;
  r.node.resize(n);
  r.weight.resize(n);
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);
    r.node[k] = 0.5 * (1.0 - x);  // descending x maps to ascending node
    r.weight[k] = w;
    r.node[n - 1 - k] = 0.5 * (1.0 + x);
    r.weight[n - 1 - k] = w;
  }
  return r;
}

inline const Rule1d& rule_01(QuadratureRule rule, int n) {
  static std::map<std::pair<int, int>, Rule1d> cache;
  const auto key = std::make_pair(static_cast<int>(rule), n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Rule1d r;
  if (rule == QuadratureRule::Midpoint) {
    r.node.resize(n);
    r.weight.assign(n, 1.0 / n);
    for (int i = 0; i < n; ++i) r.node[i] = (i + 0.5) / n;
  } else {
    r = gauss_legendre_01(n);
  }
  return cache.emplace(key, std::move(r)).first->second;
}

/// Neumaier compensated accumulator; keeps 4096^2-node sums reproducible
/// and accurate to the last bit regardless of magnitude ordering.
struct Accum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double total() const { return sum + comp; }
};

}  // namespace detail

/// Potential and flux by direct panel quadrature of 1/r and its gradient.
inline QuadResult quad_influence(double zM, const Vec3& p,
                                 const QuadratureSpec& spec,
                                 double distanceFloor = 1e-12) {
  const int nx = std::max(1, spec.nx);
  const int nz = std::max(1, spec.nz);
  const detail::Rule1d& rx = detail::rule_01(spec.rule, nx);
  const detail::Rule1d& rz = detail::rule_01(spec.rule, nz);
  const double floor2 = distanceFloor * distanceFloor;
  detail::Accum pot, fx, fy, fz;
  QuadResult out;
  for (int i = 0; i < nx; ++i) {
    const double x = rx.node[i];
    const double h = zM * (1.0 - x);
    const double wx = rx.weight[i] * h;  // Jacobian; true sub-area for midpoint
    const double dx = p.x - x;
    const double dxy2 = dx * dx + p.y * p.y;
    for (int j = 0; j < nz; ++j) {
      const double z = h * rz.node[j];
      const double dz = p.z - z;
      const double r2 = dxy2 + dz * dz;
      if (r2 < floor2) {
        out.status = QuadStatus::NodeCollision;
        return out;
      }
      const double w = wx * rz.weight[j];
      const double rinv = 1.0 / std::sqrt(r2);
      const double r3inv = rinv / r2;
      pot.add(w * rinv);
      fx.add(w * dx * r3inv);
      fy.add(w * p.y * r3inv);
      fz.add(w * dz * r3inv);
    }
  }
  out.potential = pot.total();
  out.flux = {fx.total(), fy.total(), fz.total()};
  return out;
}

/// The zeroth-order nodal model: the whole element as a point source at its
/// centroid.
inline QuadResult centroid_influence(double zM, const Vec3& p,
                                     double distanceFloor = 1e-12) {
  const Vec3 c{1.0 / 3.0, 0.0, zM / 3.0};
  const double area = 0.5 * zM;
  const Vec3 d = p - c;
  const double r2 = norm2(d);
  QuadResult out;
  if (r2 < distanceFloor * distanceFloor) {
    out.status = QuadStatus::NodeCollision;
    return out;
  }
  const double r = std::sqrt(r2);
  out.potential = area / r;
  out.flux = d * (area / (r2 * r));
  return out;
}

/// Self-refining oracle: doubles the grid from 16x16 until successive
/// levels agree to tol (relative to max(1, |value|)) or the 4096 cap is
/// hit. For points on the element plane (|y| below onPlaneEps) the
/// tangential flux components are evaluated as the symmetric pair average
/// at y = +-pairShift and fy one-sided from the +y side; the pair shift is
/// far below the node spacing of any reachable grid, so on-plane flux is a
/// best-effort convention value and convergence is judged on the potential
/// alone there.
inline OracleResult adaptive_oracle(double zM, const Vec3& p, double tol,
                                    QuadratureRule rule = QuadratureRule::GaussLegendre,
                                    int startN = 16, int capN = 4096,
                                    double onPlaneEps = 1e-12,
                                    double pairShift = 1e-6) {
  OracleResult out;
  const bool onPlane = std::abs(p.y) < onPlaneEps;
  const Vec3 pUp{p.x, pairShift, p.z};
  const Vec3 pDn{p.x, -pairShift, p.z};
  double prev[4] = {0, 0, 0, 0};
  bool have = false;
  for (int n = startN; n <= capN; n *= 2) {
    const QuadratureSpec spec{n, n, rule};
    double cur[4];
    if (onPlane) {
      const QuadResult qp = quad_influence(zM, p, spec);
      const QuadResult up = quad_influence(zM, pUp, spec);
      const QuadResult dn = quad_influence(zM, pDn, spec);
      if (!qp.ok() || !up.ok() || !dn.ok()) {
        out.status = QuadStatus::NodeCollision;
        return out;
      }
      cur[0] = qp.potential;
      cur[1] = 0.5 * (up.flux.x + dn.flux.x);
      cur[2] = up.flux.y;
      cur[3] = 0.5 * (up.flux.z + dn.flux.z);
    } else {
      const QuadResult q = quad_influence(zM, p, spec);
      if (!q.ok()) {
        out.status = QuadStatus::NodeCollision;
        return out;
      }
      cur[0] = q.potential;
      cur[1] = q.flux.x;
      cur[2] = q.flux.y;
      cur[3] = q.flux.z;
    }
    ++out.refinementLevels;
    if (have) {
      double err = 0.0;
      bool converged = true;
      const int judged = onPlane ? 1 : 4;
      for (int k = 0; k < judged; ++k) {
        const double d = std::abs(cur[k] - prev[k]);
        err = std::max(err, d);
        if (d > tol * std::max(1.0, std::abs(cur[k]))) converged = false;
      }
      out.estimatedError = err;
      if (converged) {
        out.potential = cur[0];
        out.flux = {cur[1], cur[2], cur[3]};
        return out;
      }
    }
    for (int k = 0; k < 4; ++k) prev[k] = cur[k];
    have = true;
    out.potential = cur[0];
    out.flux = {cur[1], cur[2], cur[3]};
  }
  out.status = QuadStatus::NoConvergence;
  return out;
}

}  // namespace tripanel

#endif

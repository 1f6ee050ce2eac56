#ifndef TRIPANEL_EVAL_HPP
#define TRIPANEL_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tripanel/geometry.hpp"
#include "tripanel/kernel.hpp"
#include "tripanel/quadrature.hpp"
#include "tripanel/vec3.hpp"

// Robust influence evaluation: classify the field point, run the exact
// kernels, detect failures, fall back to the adaptive quadrature, and keep
// a flag record of whatever happened.

namespace tripanel {

struct EvalPolicy {
  double distanceFloor = 1e-8;   // below this a distance counts as zero
  double specialBand = 1e-6;     // corner/edge/plane classification band
  double farFieldThreshold = 0;  // multiples of the longest side; 0 = off
  double fallbackTol = 1e-9;     // adaptive fallback tolerance
  double kernelGuardBand = kKernelGuardBand;

  bool farFieldEnabled() const { return farFieldThreshold > 0.0; }
};

enum class LocationKind {
  Generic,
  NearCorner,
  NearEdge,
  OnPlaneInside,
  OnPlaneOutside,
  FarField,
};

struct LocationClass {
  LocationKind kind = LocationKind::Generic;
  int index = -1;  // corner or edge index for the Near* kinds
  double distanceScale = 0.0;
};

enum class FlagCode {
  None,
  CornerLimit,
  EdgeLimit,
  BranchCut,
  RoundOff,
  NonFiniteResult,
  NegativePotential,
  FallbackQuadrature,
};

struct ApproxFlag {
  FlagCode code = FlagCode::None;
  std::string detail;
};

inline const char* to_string(FlagCode c) {
  switch (c) {
    case FlagCode::None: return "none";
    case FlagCode::CornerLimit: return "corner-limit";
    case FlagCode::EdgeLimit: return "edge-limit";
    case FlagCode::BranchCut: return "branch-cut";
    case FlagCode::RoundOff: return "round-off";
    case FlagCode::NonFiniteResult: return "non-finite";
    case FlagCode::NegativePotential: return "negative-potential";
    case FlagCode::FallbackQuadrature: return "fallback-quadrature";
  }
  return "?";
}

enum class EvalPath { Exact, Fallback, FarFieldApprox };

inline const char* to_string(EvalPath p) {
  switch (p) {
    case EvalPath::Exact: return "exact";
    case EvalPath::Fallback: return "fallback";
    case EvalPath::FarFieldApprox: return "far-field";
  }
  return "?";
}

struct InfluenceResult {
  double potential = 0.0;
  Vec3 flux;  // global frame
  EvalPath path = EvalPath::Exact;
  std::vector<ApproxFlag> flags;
  double imagResidue = 0.0;
};

/// Raised only when the fallback itself produces an unusable value.
class UnresolvableEvaluation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double t = std::clamp(dot(p - a, ab) / norm2(ab), 0.0, 1.0);
  return norm(p - (a + ab * t));
}

}  // namespace detail

/// Classifies a field point (local normalized coordinates) against the
/// corners, edges, and plane of the triangle. Ties break corner > edge >
/// plane.
inline LocationClass classify_location(const TrianglePrimitive& tri,
                                       const Vec3& pLocal,
                                       const EvalPolicy& policy = {}) {
  const double zM = tri.zM;
  const Vec3 corners[3] = {{0, 0, 0}, {1, 0, 0}, {0, 0, zM}};
  LocationClass cls;

  const double longestSide = std::max({1.0, zM, std::sqrt(1.0 + zM * zM)});
  if (policy.farFieldEnabled() &&
      norm(pLocal) > policy.farFieldThreshold * longestSide) {
    cls.kind = LocationKind::FarField;
    cls.distanceScale = norm(pLocal);
    return cls;
  }

  double best = policy.specialBand;
  for (int i = 0; i < 3; ++i) {
    const double d = norm(pLocal - corners[i]);
    if (d < best) {
      best = d;
      cls.kind = LocationKind::NearCorner;
      cls.index = i;
      cls.distanceScale = d;
    }
  }
  if (cls.kind == LocationKind::NearCorner) return cls;

  // Edges: 0 bottom (0,0)-(1,0), 1 hypotenuse (1,0)-(0,zM), 2 left (0,zM)-(0,0).
  const int edgeEnds[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (int i = 0; i < 3; ++i) {
    const double d = detail::point_segment_distance(pLocal, corners[edgeEnds[i][0]],
                                                    corners[edgeEnds[i][1]]);
    if (d < best) {
      best = d;
      cls.kind = LocationKind::NearEdge;
      cls.index = i;
      cls.distanceScale = d;
    }
  }
  if (cls.kind == LocationKind::NearEdge) return cls;

  if (std::abs(pLocal.y) < policy.specialBand) {
    const bool inside = pLocal.x >= 0.0 && pLocal.z >= 0.0 &&
                        zM * (pLocal.x - 1.0) + pLocal.z <= 0.0;
    cls.kind = inside ? LocationKind::OnPlaneInside : LocationKind::OnPlaneOutside;
    cls.distanceScale = std::abs(pLocal.y);
    return cls;
  }
  cls.kind = LocationKind::Generic;
  cls.distanceScale = best;
  return cls;
}

namespace detail {

inline FlagCode flag_for(KernelStatus s) {
  switch (s) {
    case KernelStatus::DegenerateLine: return FlagCode::RoundOff;
    case KernelStatus::LogDomainFailure: return FlagCode::BranchCut;
    case KernelStatus::BranchAmbiguity: return FlagCode::BranchCut;
    case KernelStatus::NonFiniteResult: return FlagCode::NonFiniteResult;
    case KernelStatus::NegativePotential: return FlagCode::NegativePotential;
    case KernelStatus::Ok: break;
  }
  return FlagCode::None;
}

}  // namespace detail

/// Influence (potential, flux) of a panel at a global point. Dispatches
/// exact kernels / centroid far-field / adaptive quadrature per the policy,
/// scales back to physical units, and multiplies by the element strength.
inline InfluenceResult influence(const PanelElement& element, const Vec3& pGlobal,
                                 const EvalPolicy& policy = {}) {
  const double zM = element.primitive.zM;
  const Vec3 pLocal = element.frame.to_local_point(pGlobal);
  const LocationClass cls = classify_location(element.primitive, pLocal, policy);
  InfluenceResult res;

  if (cls.kind == LocationKind::FarField) {
    const QuadResult q = centroid_influence(zM, pLocal, policy.distanceFloor);
    if (q.ok()) {
      res.path = EvalPath::FarFieldApprox;
      res.potential = q.potential * element.frame.scale * element.strength;
      res.flux = element.frame.to_global_vector(q.flux) * element.strength;
      return res;
    }
    // A centroid collision cannot be classified far-field, but fall through
    // to the exact/fallback route rather than assume that.
  }

  const bool special =
      cls.kind == LocationKind::NearCorner || cls.kind == LocationKind::NearEdge;
  if (special) {
    res.flags.push_back({cls.kind == LocationKind::NearCorner ? FlagCode::CornerLimit
                                                              : FlagCode::EdgeLimit,
                         cls.kind == LocationKind::NearCorner
                             ? "corner " + std::to_string(cls.index)
                             : "edge " + std::to_string(cls.index)});
  } else {
    const InfluenceOutput k = tri_influence(
        {zM, pLocal.x, pLocal.y, pLocal.z}, policy.kernelGuardBand);
    if (k.ok()) {
      res.path = EvalPath::Exact;
      res.potential = k.potential.value * element.frame.scale * element.strength;
      res.flux = element.frame.to_global_vector(
                     {k.flux.fx.value, k.flux.fy.value, k.flux.fz.value}) *
                 element.strength;
      res.imagResidue = k.potential.imagResidue;
      return res;
    }
    const KernelStatus bad = !k.potential.ok() ? k.potential.status
                             : !k.flux.fx.ok() ? k.flux.fx.status
                             : !k.flux.fy.ok() ? k.flux.fy.status
                                               : k.flux.fz.status;
    res.flags.push_back({detail::flag_for(bad), "exact kernel"});
  }

  const OracleResult q = adaptive_oracle(zM, pLocal, policy.fallbackTol);
  res.path = EvalPath::Fallback;
  res.flags.push_back({FlagCode::FallbackQuadrature, "adaptive quadrature"});
  if (q.status == QuadStatus::NoConvergence) {
    res.flags.push_back({FlagCode::RoundOff, "fallback not converged, estimated error " +
                                                 std::to_string(q.estimatedError)});
  } else if (q.status == QuadStatus::NodeCollision) {
    throw UnresolvableEvaluation(
        "influence: field point within the distance floor of a quadrature node");
  }
  if (!std::isfinite(q.potential) || q.potential <= 0.0) {
    throw UnresolvableEvaluation("influence: fallback produced unusable potential");
  }
  res.potential = q.potential * element.frame.scale * element.strength;
  res.flux = element.frame.to_global_vector(q.flux) * element.strength;
  return res;
}

}  // namespace tripanel

#endif

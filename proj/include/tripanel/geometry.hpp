#ifndef TRIPANEL_GEOMETRY_HPP
#define TRIPANEL_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "tripanel/vec3.hpp"

namespace tripanel {

/// Raised when panel construction preconditions fail.
class GeometryError : public std::invalid_argument {
 public:
  enum class Code { NotRightAngled, DegenerateTriangle, NotOrthogonalSides };

  GeometryError(Code code, const std::string& what)
      : std::invalid_argument(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

/// Normalized right triangle with vertices (0,0), (1,0), (0,zM) in its
/// local XZ plane. The x-leg is exactly 1; the hypotenuse is the line
/// zM*(x-1) + z = 0.
struct TrianglePrimitive {
  double zM = 1.0;

  double area() const { return 0.5 * zM; }
};

/// Placement of a panel in global space: origin at the right-angle vertex,
/// orthonormal basis, and the global length of the local unit x-leg.
struct ElementFrame {
  Vec3 origin;
  Vec3 basisX{1, 0, 0};
  Vec3 basisY{0, 1, 0};
  Vec3 basisZ{0, 0, 1};
  double scale = 1.0;

  Vec3 to_local_point(const Vec3& p) const {
    const Vec3 d = p - origin;
    return Vec3{dot(d, basisX), dot(d, basisY), dot(d, basisZ)} / scale;
  }
  Vec3 to_global_point(const Vec3& p) const {
    return origin + (basisX * p.x + basisY * p.y + basisZ * p.z) * scale;
  }
  /// Rotation only: flux vectors are invariant under the uniform scaling.
  Vec3 to_global_vector(const Vec3& v) const {
    return basisX * v.x + basisY * v.y + basisZ * v.z;
  }
  Vec3 to_local_vector(const Vec3& v) const {
    return {dot(v, basisX), dot(v, basisY), dot(v, basisZ)};
  }
};

/// A physical flat panel: normalized shape, placement, uniform source density.
struct PanelElement {
  TrianglePrimitive primitive;
  ElementFrame frame;
  double strength = 1.0;

  double area() const { return primitive.area() * frame.scale * frame.scale; }
  Vec3 centroid() const {
    return frame.to_global_point({1.0 / 3.0, 0.0, primitive.zM / 3.0});
  }
  std::array<Vec3, 3> vertices() const {
    return {frame.to_global_point({0, 0, 0}),
            frame.to_global_point({1, 0, 0}),
            frame.to_global_point({0, 0, primitive.zM})};
  }
};

namespace detail {
inline constexpr double kOrthoTol = 1e-9;
inline constexpr double kLengthFloor = 1e-12;
}  // namespace detail

/// Builds the normalized triangle and frame from physical vertices.
/// v0 must be the right-angle vertex; basisX runs along v1-v0 and
/// basisZ along v2-v0. basisY = basisX x basisZ fixes which side of the
/// panel is local +Y.
inline std::pair<TrianglePrimitive, ElementFrame> frame_from_right_triangle(
    const Vec3& v0, const Vec3& v1, const Vec3& v2) {
  const Vec3 ex = v1 - v0;
  const Vec3 ez = v2 - v0;
  const double lx = norm(ex);
  const double lz = norm(ez);
  if (lx < detail::kLengthFloor || lz < detail::kLengthFloor) {
    throw GeometryError(GeometryError::Code::DegenerateTriangle,
                        "frame_from_right_triangle: leg below length floor");
  }
  if (std::abs(dot(ex, ez)) > detail::kOrthoTol * lx * lz) {
    throw GeometryError(GeometryError::Code::NotRightAngled,
                        "frame_from_right_triangle: legs not orthogonal at v0");
  }
  ElementFrame frame;
  frame.origin = v0;
  frame.basisX = ex / lx;
  frame.basisZ = ez / lz;
  frame.basisY = cross(frame.basisX, frame.basisZ);
  frame.scale = lx;
  return {TrianglePrimitive{lz / lx}, frame};
}

/// Convenience wrapper: tries all three vertex orderings and returns the one
/// whose first vertex carries the right angle.
inline std::pair<TrianglePrimitive, ElementFrame> frame_from_right_triangle_auto(
    const Vec3& a, const Vec3& b, const Vec3& c) {
  const std::array<std::array<Vec3, 3>, 3> orders = {
      std::array<Vec3, 3>{a, b, c}, {b, c, a}, {c, a, b}};
  for (const auto& o : orders) {
    const Vec3 e1 = o[1] - o[0];
    const Vec3 e2 = o[2] - o[0];
    if (std::abs(dot(e1, e2)) <= detail::kOrthoTol * norm(e1) * norm(e2)) {
      return frame_from_right_triangle(o[0], o[1], o[2]);
    }
  }
  throw GeometryError(GeometryError::Code::NotRightAngled,
                      "frame_from_right_triangle_auto: no right-angle vertex");
}

using TriangleVertices = std::array<Vec3, 3>;

/// Splits an arbitrary triangle into two right triangles by dropping the
/// perpendicular from one vertex onto the opposite side. The foot must fall
/// strictly inside that side, which always holds for the side opposite the
/// largest angle (the longest side). Each output lists its right-angle
/// vertex (the foot) first.
inline std::pair<TriangleVertices, TriangleVertices> split_general_triangle(
    const Vec3& v0, const Vec3& v1, const Vec3& v2) {
  const double area2 = norm(cross(v1 - v0, v2 - v0));
  const double longest =
      std::max({norm(v1 - v0), norm(v2 - v0), norm(v2 - v1)});
  if (area2 < detail::kLengthFloor * longest * longest) {
    throw GeometryError(GeometryError::Code::DegenerateTriangle,
                        "split_general_triangle: area below floor");
  }
  // Pick the longest side; the altitude from the opposite vertex lands
  // inside it.
  const std::array<Vec3, 3> v = {v0, v1, v2};
  int apex = 0;
  double best = -1.0;
  for (int i = 0; i < 3; ++i) {
    const double side = norm(v[(i + 2) % 3] - v[(i + 1) % 3]);
    if (side > best) {
      best = side;
      apex = i;
    }
  }
  const Vec3 p = v[apex];
  const Vec3 a = v[(apex + 1) % 3];
  const Vec3 b = v[(apex + 2) % 3];
  const Vec3 ab = b - a;
  const double t = dot(p - a, ab) / norm2(ab);
  const Vec3 foot = a + ab * t;
  return {TriangleVertices{foot, a, p}, TriangleVertices{foot, b, p}};
}

/// Splits a rectangle (corner + two orthogonal side vectors) into two right
/// triangles sharing the diagonal.
inline std::pair<TriangleVertices, TriangleVertices> split_rectangle(
    const Vec3& corner, const Vec3& sideA, const Vec3& sideB) {
  const double la = norm(sideA);
  const double lb = norm(sideB);
  if (la < detail::kLengthFloor || lb < detail::kLengthFloor) {
    throw GeometryError(GeometryError::Code::DegenerateTriangle,
                        "split_rectangle: side below length floor");
  }
  if (std::abs(dot(sideA, sideB)) > detail::kOrthoTol * la * lb) {
    throw GeometryError(GeometryError::Code::NotOrthogonalSides,
                        "split_rectangle: sides not orthogonal");
  }
  const Vec3 c0 = corner;
  const Vec3 c1 = corner + sideA;
  const Vec3 c2 = corner + sideB;
  const Vec3 c3 = corner + sideA + sideB;
  return {TriangleVertices{c0, c1, c2}, TriangleVertices{c3, c2, c1}};
}

}  // namespace tripanel

#endif

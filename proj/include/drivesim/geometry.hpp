#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace drivesim::geo {

/// Planar vector in the world frame (x east, y north), meters.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }
inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline bool is_finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Wraps an angle into (-pi, pi]. Angles already in range are returned
/// unchanged (bit-identical).
double normalize_angle(double angle);

struct Pose2 {
  Vec2 position;
  double heading = 0.0;  // radians, (-pi, pi]

  bool operator==(const Pose2&) const = default;
};

/// Maps a point given in `frame`'s body coordinates (x forward, y left) to
/// the parent frame.
Vec2 to_world(const Pose2& frame, const Vec2& local);

/// Expresses a parent-frame point in `frame`'s body coordinates.
Vec2 to_local(const Pose2& frame, const Vec2& world);

/// Pose of `child` (expressed relative to `parent`) in the parent's frame.
Pose2 compose(const Pose2& parent, const Pose2& child);

using Polygon = std::vector<Vec2>;

/// Twice the signed area; positive for counterclockwise winding.
double signed_area2(std::span<const Vec2> poly);
double area(std::span<const Vec2> poly);

bool is_counterclockwise(std::span<const Vec2> poly);
bool is_convex(std::span<const Vec2> poly);

/// True when no two non-adjacent edges touch and no adjacent edges fold back.
bool is_simple(std::span<const Vec2> poly);

/// Even-odd containment. Points exactly on the boundary may go either way.
bool contains(std::span<const Vec2> poly, const Vec2& p);

/// Counterclockwise rectangle of `length` along the heading and `width`
/// across it, centered on the pose.
Polygon oriented_rect(const Pose2& center, double length, double width);

struct Aabb {
  Vec2 min;
  Vec2 max;
};
Aabb bounds(std::span<const Vec2> poly);

/// Parameter t >= 0 at which the ray origin + t*dir first touches segment
/// [a, b]; colinear overlaps report the nearest touching point.
std::optional<double> ray_segment(const Vec2& origin, const Vec2& dir, const Vec2& a, const Vec2& b);

/// Nearest boundary hit of a ray against a closed polygon, or 0 when the
/// origin lies inside.
std::optional<double> ray_polygon(const Vec2& origin, const Vec2& dir, std::span<const Vec2> poly);

/// Separating-axis test on two convex polygons. Touching boundaries do not
/// count as overlap.
bool convex_overlap(std::span<const Vec2> a, std::span<const Vec2> b);

/// Ear-clipping triangulation of a simple counterclockwise polygon.
std::vector<std::array<Vec2, 3>> triangulate(std::span<const Vec2> poly);

/// Interior-intersection test for a convex polygon against a simple
/// (possibly concave) polygon.
bool overlap(std::span<const Vec2> convex, std::span<const Vec2> simple);

}  // namespace drivesim::geo

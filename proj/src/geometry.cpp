#include "drivesim/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace drivesim::geo {

namespace {

constexpr double kPi = std::numbers::pi;

bool segments_touch(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); };
  auto on_segment = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
           c.y <= std::max(a.y, b.y);
  };
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

// Projection interval of a polygon onto an axis.
std::pair<double, double> project(std::span<const Vec2> poly, const Vec2& axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : poly) {
    const double d = dot(p, axis);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

bool separated_along_edges(std::span<const Vec2> a, std::span<const Vec2> b) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = a[(i + 1) % n] - a[i];
    const Vec2 axis{-e.y, e.x};
    if (axis.x == 0.0 && axis.y == 0.0) continue;
    const auto [alo, ahi] = project(a, axis);
    const auto [blo, bhi] = project(b, axis);
    if (ahi <= blo || bhi <= alo) return true;
  }
  return false;
}

}  // namespace

double normalize_angle(double angle) {
  if (angle > -kPi && angle <= kPi) return angle;
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Vec2 to_world(const Pose2& frame, const Vec2& local) {
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  return {frame.position.x + c * local.x - s * local.y, frame.position.y + s * local.x + c * local.y};
}

Vec2 to_local(const Pose2& frame, const Vec2& world) {
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  const Vec2 d = world - frame.position;
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

Pose2 compose(const Pose2& parent, const Pose2& child) {
  return {to_world(parent, child.position), normalize_angle(parent.heading + child.heading)};
}

double signed_area2(std::span<const Vec2> poly) {
  double sum = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) sum += cross(poly[i], poly[(i + 1) % n]);
  return sum;
}

double area(std::span<const Vec2> poly) { return std::abs(signed_area2(poly)) * 0.5; }

bool is_counterclockwise(std::span<const Vec2> poly) { return signed_area2(poly) > 0.0; }

bool is_convex(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = cross(poly[(i + 1) % n] - poly[i], poly[(i + 2) % n] - poly[(i + 1) % n]);
    if (c == 0.0) continue;
    const int s = c > 0 ? 1 : -1;
    if (sign == 0) {
      sign = s;
    } else if (s != sign) {
      return false;
    }
  }
  return sign != 0;
}

bool is_simple(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (poly[i] == poly[(i + 1) % n]) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a1 = poly[i];
    const Vec2& a2 = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      const Vec2& b1 = poly[j];
      const Vec2& b2 = poly[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges share a vertex; they must not overlap colinearly.
        const Vec2 shared = (j == i + 1) ? a2 : a1;
        const Vec2 other_a = (j == i + 1) ? a1 : a2;
        const Vec2 other_b = (j == i + 1) ? b2 : b1;
        const Vec2 u = other_a - shared;
        const Vec2 v = other_b - shared;
        if (cross(u, v) == 0.0 && dot(u, v) > 0.0) return false;
        continue;
      }
      if (segments_touch(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

bool contains(std::span<const Vec2> poly, const Vec2& p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

Polygon oriented_rect(const Pose2& center, double length, double width) {
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  return {to_world(center, {hl, -hw}), to_world(center, {hl, hw}), to_world(center, {-hl, hw}),
          to_world(center, {-hl, -hw})};
}

Aabb bounds(std::span<const Vec2> poly) {
  Aabb box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
           {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (const auto& p : poly) {
    box.min.x = std::min(box.min.x, p.x);
    box.min.y = std::min(box.min.y, p.y);
    box.max.x = std::max(box.max.x, p.x);
    box.max.y = std::max(box.max.y, p.y);
  }
  return box;
}

std::optional<double> ray_segment(const Vec2& origin, const Vec2& dir, const Vec2& a, const Vec2& b) {
  const Vec2 e = b - a;
  const Vec2 ao = a - origin;
  const double denom = cross(dir, e);
  if (denom == 0.0) {
    if (cross(ao, dir) != 0.0) return std::nullopt;
    // Colinear: nearest of the two endpoints ahead, or 0 if the origin is on the segment.
    const double ta = dot(ao, dir);
    const double tb = dot(b - origin, dir);
    if ((ta <= 0.0 && tb >= 0.0) || (tb <= 0.0 && ta >= 0.0)) return 0.0;
    const double t = std::min(ta, tb);
    if (t < 0.0) return std::nullopt;
    return t;
  }
  const double t = cross(ao, e) / denom;
  const double s = cross(ao, dir) / denom;
  if (t < 0.0 || s < 0.0 || s > 1.0) return std::nullopt;
  return t;
}

std::optional<double> ray_polygon(const Vec2& origin, const Vec2& dir, std::span<const Vec2> poly) {
  if (contains(poly, origin)) return 0.0;
  std::optional<double> best;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (auto t = ray_segment(origin, dir, poly[i], poly[(i + 1) % n])) {
      if (!best || *t < *best) best = t;
    }
  }
  return best;
}

bool convex_overlap(std::span<const Vec2> a, std::span<const Vec2> b) {
  return !separated_along_edges(a, b) && !separated_along_edges(b, a);
}

std::vector<std::array<Vec2, 3>> triangulate(std::span<const Vec2> poly) {
  std::vector<std::array<Vec2, 3>> tris;
  std::vector<std::size_t> idx(poly.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

  auto is_ear = [&](std::size_t k) {
    const std::size_t m = idx.size();
    const Vec2& prev = poly[idx[(k + m - 1) % m]];
    const Vec2& cur = poly[idx[k]];
    const Vec2& next = poly[idx[(k + 1) % m]];
    if (cross(cur - prev, next - cur) <= 0.0) return false;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == k || j == (k + 1) % m || j == (k + m - 1) % m) continue;
      const Vec2& p = poly[idx[j]];
      if (cross(cur - prev, p - prev) >= 0.0 && cross(next - cur, p - cur) >= 0.0 &&
          cross(prev - next, p - next) >= 0.0) {
        return false;
      }
    }
    return true;
  };

  while (idx.size() > 3) {
    bool clipped = false;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (!is_ear(k)) continue;
      const std::size_t m = idx.size();
      tris.push_back({poly[idx[(k + m - 1) % m]], poly[idx[k]], poly[idx[(k + 1) % m]]});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(k));
      clipped = true;
      break;
    }
    if (!clipped) break;  // degenerate input; emit what remains as a fan
  }
  for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
    tris.push_back({poly[idx[0]], poly[idx[k]], poly[idx[k + 1]]});
  }
  return tris;
}

bool overlap(std::span<const Vec2> convex, std::span<const Vec2> simple) {
  if (is_convex(simple)) return convex_overlap(convex, simple);
  for (const auto& tri : triangulate(simple)) {
    if (convex_overlap(convex, tri)) return true;
  }
  return false;
}

}  // namespace drivesim::geo

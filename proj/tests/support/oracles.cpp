#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace oracle {

std::optional<double> ray_segment(Vec2 o, Vec2 d, Vec2 a, Vec2 b) {
  // | d.x  -(b-a).x | |t|   |a.x - o.x|
  // | d.y  -(b-a).y | |s| = |a.y - o.y|
  const double m11 = d.x, m12 = -(b.x - a.x);
  const double m21 = d.y, m22 = -(b.y - a.y);
  const double r1 = a.x - o.x, r2 = a.y - o.y;
  const double det = m11 * m22 - m12 * m21;
  if (det == 0.0) return std::nullopt;
  const double t = (r1 * m22 - m12 * r2) / det;
  const double s = (m11 * r2 - r1 * m21) / det;
  if (t < 0.0 || s < 0.0 || s > 1.0) return std::nullopt;
  return t;
}

bool inside(const Poly& poly, Vec2 p) {
  double winding = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i] - p;
    const Vec2 b = poly[(i + 1) % poly.size()] - p;
    const double cr = a.x * b.y - a.y * b.x;
    const double dt = a.x * b.x + a.y * b.y;
    if (cr == 0.0 && dt <= 0.0) return true;  // on the edge
    winding += std::atan2(cr, dt);
  }
  return std::abs(winding) > 3.0;  // 2 pi when inside, 0 outside
}

double cast(Vec2 o, Vec2 d, const std::vector<Poly>& polys, double max_range) {
  double best = max_range;
  for (const auto& poly : polys) {
    if (inside(poly, o)) return 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      if (auto t = oracle::ray_segment(o, d, poly[i], poly[(i + 1) % poly.size()]); t && *t < best) best = *t;
    }
  }
  return best;
}

Circle fit_circle(const std::vector<Vec2>& pts) {
  // x^2 + y^2 + D x + E y + F = 0, normal equations solved by Cramer.
  double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, n = 0, sxz = 0, syz = 0, sz = 0;
  for (const auto& p : pts) {
    const double z = p.x * p.x + p.y * p.y;
    sxx += p.x * p.x;
    sxy += p.x * p.y;
    syy += p.y * p.y;
    sx += p.x;
    sy += p.y;
    n += 1;
    sxz += p.x * z;
    syz += p.y * z;
    sz += z;
  }
  const double A[3][3] = {{sxx, sxy, sx}, {sxy, syy, sy}, {sx, sy, n}};
  const double r[3] = {-sxz, -syz, -sz};
  auto det3 = [](const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double det = det3(A);
  double sol[3];
  for (int c = 0; c < 3; ++c) {
    double m[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] = j == c ? r[i] : A[i][j];
    sol[c] = det3(m) / det;
  }
  Circle out;
  out.center = {-sol[0] / 2, -sol[1] / 2};
  out.radius = std::sqrt(out.center.x * out.center.x + out.center.y * out.center.y - sol[2]);
  return out;
}

double overlap_area_mc(const Poly& a, const Poly& b, int samples, std::uint64_t seed) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const auto& p : a) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  int hits = 0;
  for (int i = 0; i < samples; ++i) {
    const Vec2 p{ux(gen), uy(gen)};
    if (inside(a, p) && inside(b, p)) ++hits;
  }
  return (x1 - x0) * (y1 - y0) * hits / samples;
}

std::vector<double> speed_recurrence(const SpeedLoop& p, double setpoint, double dt, int n) {
  std::vector<double> v(n + 1, 0.0);
  double integral = 0.0, prev = 0.0;
  bool first = true;
  for (int k = 0; k < n; ++k) {
    const double e = setpoint - v[k];
    const double i_new = std::clamp(integral + e * dt, -p.ilimit, p.ilimit);
    const double der = first ? 0.0 : (e - prev) / dt;
    double u = p.kp * e + p.ki * i_new + p.kd * der;
    const bool hold = p.conditional && ((u > 1.0 && e > 0.0) || (u < -1.0 && e < 0.0));
    if (hold) {
      u = p.kp * e + p.ki * integral + p.kd * der;
    } else {
      integral = i_new;
    }
    prev = e;
    first = false;
    u = std::clamp(u, -1.0, 1.0);
    const double throttle = u > 0 ? u : 0.0;
    const double brake = u < 0 ? -u : 0.0;
    const double force = throttle * p.max_drive * p.traction * p.friction - brake * p.max_brake * p.friction -
                         p.drag * v[k] * v[k] - p.rolling * v[k];
    v[k + 1] = std::max(0.0, v[k] + force / p.mass * dt);
  }
  return v;
}

Poly project(const drivesim::geo::Pose2& cam, int w, int h, double mpp, const Poly& world_poly) {
  const double c = std::cos(cam.heading), s = std::sin(cam.heading);
  Poly out;
  for (const auto& p : world_poly) {
    const double dx = p.x - cam.position.x, dy = p.y - cam.position.y;
    const double fwd = c * dx + s * dy;
    const double lat = -s * dx + c * dy;
    out.push_back({w / 2.0 - lat / mpp, h / 2.0 - fwd / mpp});
  }
  return out;
}

Box projected_box(const drivesim::geo::Pose2& cam, int w, int h, double mpp, const Poly& world_poly) {
  double u0 = 1e300, v0 = 1e300, u1 = -1e300, v1 = -1e300;
  for (const auto& p : project(cam, w, h, mpp, world_poly)) {
    u0 = std::min(u0, p.x);
    v0 = std::min(v0, p.y);
    u1 = std::max(u1, p.x);
    v1 = std::max(v1, p.y);
  }
  Box b{static_cast<int>(std::floor(u0)), static_cast<int>(std::floor(v0)), static_cast<int>(std::ceil(u1)),
        static_cast<int>(std::ceil(v1))};
  b.x0 = std::clamp(b.x0, 0, w);
  b.x1 = std::clamp(b.x1, 0, w);
  b.y0 = std::clamp(b.y0, 0, h);
  b.y1 = std::clamp(b.y1, 0, h);
  return b;
}

bool intersects_image(const Poly& poly, int w, int h) {
  const Poly rect{{0, 0}, {double(w), 0}, {double(w), double(h)}, {0, double(h)}};
  for (const auto& p : poly) {
    if (p.x > 0 && p.x < w && p.y > 0 && p.y < h) return true;
  }
  for (const auto& p : rect) {
    if (inside(poly, p)) {
      // A corner on the boundary alone is not shared area; nudge toward the center.
      const Vec2 q{p.x + (p.x == 0 ? 1e-6 : -1e-6), p.y + (p.y == 0 ? 1e-6 : -1e-6)};
      if (inside(poly, q)) return true;
    }
  }
  auto cross = [](Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    for (std::size_t j = 0; j < 4; ++j) {
      const Vec2 c = rect[j], d = rect[(j + 1) % 4];
      const double d1 = cross(c, d, a), d2 = cross(c, d, b), d3 = cross(a, b, c), d4 = cross(a, b, d);
      if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    }
  }
  return false;
}

}  // namespace oracle

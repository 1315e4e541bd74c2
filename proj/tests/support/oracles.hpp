#pragma once

// Reference implementations used by the tests. They are deliberately naive
// and share no code with the library.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "drivesim/dynamics.hpp"
#include "drivesim/geometry.hpp"
#include "drivesim/pid.hpp"

namespace oracle {

using drivesim::geo::Vec2;
using Poly = std::vector<Vec2>;

/// Ray against one segment by Cramer's rule on o + t d = a + s (b - a).
/// Parallel segments are reported as misses.
std::optional<double> ray_segment(Vec2 o, Vec2 d, Vec2 a, Vec2 b);

/// Winding-number containment; boundary points count as inside.
bool inside(const Poly& poly, Vec2 p);

/// Brute-force nearest hit over every edge of every polygon; 0 if the origin
/// is inside one of them; max_range on a miss.
double cast(Vec2 o, Vec2 d, const std::vector<Poly>& polys, double max_range);

/// Least-squares circle through points (Kasa): returns center and radius.
struct Circle {
  Vec2 center;
  double radius = 0.0;
};
Circle fit_circle(const std::vector<Vec2>& pts);

/// Monte Carlo estimate of the intersection area of two polygons.
double overlap_area_mc(const Poly& a, const Poly& b, int samples, std::uint64_t seed);

/// Longitudinal closed loop of a PID speed controller on the electric
/// powertrain, written out as a scalar recurrence. Returns v_k for k = 0..n.
struct SpeedLoop {
  double kp, ki, kd, ilimit;
  double mass, max_drive, max_brake, drag, rolling, traction, friction;
  bool conditional = true;
};
std::vector<double> speed_recurrence(const SpeedLoop& p, double setpoint, double dt, int n);

/// Pixel box of a world rectangle seen by a top-down camera, computed from the
/// corner projections alone: column = W/2 - lateral/mpp, row = H/2 - forward/mpp.
struct Box {
  int x0, y0, x1, y1;  // half-open [x0, x1) x [y0, y1)
  bool empty() const { return x1 <= x0 || y1 <= y0; }
};
Box projected_box(const drivesim::geo::Pose2& cam, int w, int h, double mpp, const Poly& world_poly);

/// Corner-wise projection used by projected_box.
Poly project(const drivesim::geo::Pose2& cam, int w, int h, double mpp, const Poly& world_poly);

/// Whether a polygon shares interior area with the image rectangle [0,w] x [0,h].
bool intersects_image(const Poly& image_poly, int w, int h);

}  // namespace oracle

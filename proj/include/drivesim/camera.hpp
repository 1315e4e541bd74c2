#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drivesim/sensor_config.hpp"
#include "drivesim/world.hpp"

namespace drivesim {

using Rgb = std::array<std::uint8_t, 3>;

/// Class id -> color. Stable across versions (see docs/palette.md).
const std::array<Rgb, kSemanticClassCount>& default_palette();

/// Orthographic top-down projection of a camera. The image is centered on the
/// camera pose with its heading pointing to the top row; column 0 is the
/// left-most (positive lateral) side.
class CameraGeometry {
 public:
  CameraGeometry(const geo::Pose2& pose, int width_px, int height_px, double meters_per_px);

  const geo::Pose2& pose() const { return pose_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double meters_per_px() const { return mpp_; }

  /// Continuous image coordinates (u right, v down, pixel (c, r) covers
  /// [c, c+1) x [r, r+1)).
  geo::Vec2 to_image(const geo::Vec2& world) const;
  geo::Vec2 to_world(const geo::Vec2& image) const;
  geo::Polygon to_image(std::span<const geo::Vec2> world) const;

 private:
  geo::Pose2 pose_;
  int width_;
  int height_;
  double mpp_;
};

/// Calls `paint(col, row)` for every pixel whose center lies inside the image
/// polygon (even-odd rule, half-open on the right and bottom edges).
template <typename Paint>
void rasterize(std::span<const geo::Vec2> poly, int width, int height, Paint&& paint);

/// Object painted into a frame; instance buffers index into this list.
struct PaintedObject {
  ObjectRef ref;
  SemanticClass semantic_class = SemanticClass::background;
};

struct CameraFrame {
  enum class Mode { semantic, rgb };

  std::string sensor_id;
  double timestamp = 0.0;
  int width_px = 0;
  int height_px = 0;
  double meters_per_px = 0.0;
  Mode mode = Mode::semantic;
  geo::Pose2 pose;  // world pose of the camera at capture
  /// Row-major, top row farthest forward: one class id per pixel (semantic)
  /// or three bytes per pixel (rgb).
  std::vector<std::uint8_t> pixels;
  /// Always filled: class id per pixel regardless of mode.
  std::vector<std::uint8_t> classes;
  /// Index into `objects` of the topmost painted object per pixel, -1 for
  /// background.
  std::vector<std::int32_t> instances;
  std::vector<PaintedObject> objects;

  CameraGeometry geometry() const { return {pose, width_px, height_px, meters_per_px}; }
  std::size_t channels() const { return mode == Mode::rgb ? 3 : 1; }
};

/// Renders the world from `camera_pose` (already composed with the carrier
/// pose). Painter's order: ground < static solids < vehicles, ties by object.
CameraFrame render_camera(const SensorConfig& config, const geo::Pose2& camera_pose, const WorldView& world,
                          double timestamp);

/// Palette lookup of a class-id buffer into interleaved RGB.
std::vector<std::uint8_t> colorize(std::span<const std::uint8_t> classes);

// ---------------------------------------------------------------------------

template <typename Paint>
void rasterize(std::span<const geo::Vec2> poly, int width, int height, Paint&& paint) {
  if (poly.size() < 3) return;
  double ymin = poly[0].y, ymax = poly[0].y;
  for (const auto& p : poly) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const int r0 = std::max(0, static_cast<int>(std::ceil(ymin - 0.5)));
  const int r1 = std::min(height - 1, static_cast<int>(std::ceil(ymax - 0.5)) - 1);
  std::vector<double> xs;
  for (int r = r0; r <= r1; ++r) {
    const double y = r + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
      const geo::Vec2& a = poly[j];
      const geo::Vec2& b = poly[i];
      if ((a.y > y) != (b.y > y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int c0 = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
      const int c1 = std::min(width - 1, static_cast<int>(std::ceil(xs[k + 1] - 0.5)) - 1);
      for (int c = c0; c <= c1; ++c) paint(c, r);
    }
  }
}

}  // namespace drivesim

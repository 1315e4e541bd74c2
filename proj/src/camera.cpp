#include "drivesim/camera.hpp"

#include <algorithm>
#include <tuple>

namespace drivesim {

const std::array<Rgb, kSemanticClassCount>& default_palette() {
  static const std::array<Rgb, kSemanticClassCount> palette = {{
      {0, 0, 0},        // background
      {128, 64, 128},   // road
      {220, 220, 220},  // crosswalk
      {244, 35, 232},   // sidewalk
      {70, 70, 70},     // building
      {107, 142, 35},   // vegetation
      {190, 153, 153},  // barrier
      {0, 0, 142},      // vehicle
      {255, 160, 0},    // ego
  }};
  return palette;
}

CameraGeometry::CameraGeometry(const geo::Pose2& pose, int width_px, int height_px, double meters_per_px)
    : pose_(pose), width_(width_px), height_(height_px), mpp_(meters_per_px) {}

geo::Vec2 CameraGeometry::to_image(const geo::Vec2& world) const {
  const geo::Vec2 local = geo::to_local(pose_, world);
  return {0.5 * width_ - local.y / mpp_, 0.5 * height_ - local.x / mpp_};
}

geo::Vec2 CameraGeometry::to_world(const geo::Vec2& image) const {
  const geo::Vec2 local{(0.5 * height_ - image.y) * mpp_, (0.5 * width_ - image.x) * mpp_};
  return geo::to_world(pose_, local);
}

geo::Polygon CameraGeometry::to_image(std::span<const geo::Vec2> world) const {
  geo::Polygon out;
  out.reserve(world.size());
  for (const auto& p : world) out.push_back(to_image(p));
  return out;
}

namespace {

int paint_rank(SemanticClass c) {
  switch (c) {
    case SemanticClass::background: return 0;
    case SemanticClass::road: return 1;
    case SemanticClass::crosswalk: return 2;
    case SemanticClass::sidewalk: return 3;
    case SemanticClass::building:
    case SemanticClass::vegetation:
    case SemanticClass::barrier: return 4;
    case SemanticClass::vehicle:
    case SemanticClass::ego: return 5;
  }
  return 0;
}

struct Drawable {
  PaintedObject object;
  std::span<const geo::Vec2> polygon;
};

}  // namespace

CameraFrame render_camera(const SensorConfig& config, const geo::Pose2& camera_pose, const WorldView& world,
                          double timestamp) {
  const CameraParams& p = config.camera();
  CameraFrame f;
  f.sensor_id = config.id;
  f.timestamp = timestamp;
  f.width_px = p.width_px;
  f.height_px = p.height_px;
  f.meters_per_px = p.meters_per_px;
  f.mode = config.kind == SensorKind::camera_rgb ? CameraFrame::Mode::rgb : CameraFrame::Mode::semantic;
  f.pose = camera_pose;
  const auto n = static_cast<std::size_t>(p.width_px) * static_cast<std::size_t>(p.height_px);
  f.classes.assign(n, static_cast<std::uint8_t>(SemanticClass::background));
  f.instances.assign(n, -1);

  const CameraGeometry geom = f.geometry();
  // Everything within the raster's circumradius of its center may be visible.
  const double reach = 0.5 * std::hypot(p.width_px, p.height_px) * p.meters_per_px;
  const geo::Aabb view{{camera_pose.position.x - reach, camera_pose.position.y - reach},
                       {camera_pose.position.x + reach, camera_pose.position.y + reach}};
  auto visible = [&](std::span<const geo::Vec2> poly) {
    const geo::Aabb b = geo::bounds(poly);
    return b.max.x >= view.min.x && b.min.x <= view.max.x && b.max.y >= view.min.y && b.min.y <= view.max.y;
  };

  std::vector<Drawable> items;
  if (world.map) {
    for (const auto& o : world.map->obstacles) {
      if (visible(o.polygon)) items.push_back({{ObjectRef::obstacle(o.id), o.semantic_class}, o.polygon});
    }
  }
  for (const auto& v : world.vehicles) {
    if (visible(v.polygon)) items.push_back({{ObjectRef::vehicle(v.id), v.semantic_class}, v.polygon});
  }
  std::sort(items.begin(), items.end(), [](const Drawable& a, const Drawable& b) {
    return std::tuple(paint_rank(a.object.semantic_class), a.object.ref) <
           std::tuple(paint_rank(b.object.semantic_class), b.object.ref);
  });

  for (const auto& item : items) {
    const auto index = static_cast<std::int32_t>(f.objects.size());
    f.objects.push_back(item.object);
    const auto cls = static_cast<std::uint8_t>(item.object.semantic_class);
    const geo::Polygon img = geom.to_image(item.polygon);
    rasterize(img, p.width_px, p.height_px, [&](int c, int r) {
      const std::size_t i = static_cast<std::size_t>(r) * static_cast<std::size_t>(p.width_px) + c;
      f.classes[i] = cls;
      f.instances[i] = index;
    });
  }

  f.pixels = f.mode == CameraFrame::Mode::rgb ? colorize(f.classes) : f.classes;
  return f;
}

std::vector<std::uint8_t> colorize(std::span<const std::uint8_t> classes) {
  const auto& palette = default_palette();
  std::vector<std::uint8_t> out(classes.size() * 3);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const Rgb& c = palette[classes[i] < kSemanticClassCount ? classes[i] : 0];
    out[3 * i] = c[0];
    out[3 * i + 1] = c[1];
    out[3 * i + 2] = c[2];
  }
  return out;
}

}  // namespace drivesim

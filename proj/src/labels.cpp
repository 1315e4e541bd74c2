#include "drivesim/labels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace drivesim {

PixelBox pixel_box(std::span<const geo::Vec2> image_polygon, int width, int height) {
  if (image_polygon.empty()) return {};
  const geo::Aabb b = geo::bounds(image_polygon);
  const double x0 = std::clamp(std::floor(b.min.x), 0.0, static_cast<double>(width));
  const double y0 = std::clamp(std::floor(b.min.y), 0.0, static_cast<double>(height));
  const double x1 = std::clamp(std::ceil(b.max.x), 0.0, static_cast<double>(width));
  const double y1 = std::clamp(std::ceil(b.max.y), 0.0, static_cast<double>(height));
  return {static_cast<int>(x0), static_cast<int>(y0), static_cast<int>(x1 - x0), static_cast<int>(y1 - y0)};
}

namespace {

struct Candidate {
  ObjectRef ref;
  SemanticClass cls;
  std::span<const geo::Vec2> polygon;
  geo::Vec2 world_origin;
  std::array<double, 2> world_dimension;
  double world_heading;
};

}  // namespace

std::vector<LabelRecord> generate_labels(const CameraFrame& frame, const WorldView& world,
                                         const std::set<SemanticClass>& target_classes) {
  std::vector<Candidate> candidates;
  if (world.map) {
    for (const auto& o : world.map->obstacles) {
      if (!target_classes.contains(o.semantic_class)) continue;
      const geo::Aabb b = geo::bounds(o.polygon);
      candidates.push_back({ObjectRef::obstacle(o.id), o.semantic_class, o.polygon,
                            {(b.min.x + b.max.x) / 2.0, (b.min.y + b.max.y) / 2.0},
                            {b.max.x - b.min.x, b.max.y - b.min.y}, 0.0});
    }
  }
  for (const auto& v : world.vehicles) {
    if (!target_classes.contains(v.semantic_class)) continue;
    candidates.push_back({ObjectRef::vehicle(v.id), v.semantic_class, v.polygon, v.pose.position,
                          {v.length, v.width}, v.pose.heading});
  }

  std::map<ObjectRef, std::int32_t> frame_index;
  for (std::size_t i = 0; i < frame.objects.size(); ++i) frame_index[frame.objects[i].ref] = static_cast<std::int32_t>(i);
  std::vector<std::int64_t> painted(frame.objects.size(), 0);
  for (const auto idx : frame.instances) {
    if (idx >= 0) ++painted[static_cast<std::size_t>(idx)];
  }

  const CameraGeometry geom = frame.geometry();
  const int w = frame.width_px;
  const int h = frame.height_px;
  const geo::Polygon image_rect{{0, 0}, {static_cast<double>(w), 0}, {static_cast<double>(w), static_cast<double>(h)},
                                {0, static_cast<double>(h)}};

  std::vector<LabelRecord> out;
  for (const auto& c : candidates) {
    geo::Polygon img = geom.to_image(c.polygon);
    const PixelBox box = pixel_box(img, w, h);
    if (box.empty()) continue;
    // The image transform mirrors orientation; restore CCW for the overlap test.
    std::reverse(img.begin(), img.end());
    if (!geo::overlap(std::span<const geo::Vec2>(image_rect), img)) continue;

    std::int64_t expected = 0;
    rasterize(img, w, h, [&](int, int) { ++expected; });
    std::int64_t visible = 0;
    if (auto it = frame_index.find(c.ref); it != frame_index.end()) visible = painted[static_cast<std::size_t>(it->second)];

    LabelRecord r;
    r.label = std::string(to_string(c.cls));
    r.instance_id = c.ref.id;
    r.origin = {box.x, box.y};
    r.dimension = {box.w, box.h};
    r.world_origin = c.world_origin;
    r.world_dimension = c.world_dimension;
    r.world_heading = c.world_heading;
    r.occluded_fraction = expected > 0 ? 1.0 - static_cast<double>(visible) / static_cast<double>(expected) : 0.0;
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json to_json(const LabelRecord& r) {
  return {{"label", r.label},
          {"instance_id", r.instance_id},
          {"origin", r.origin},
          {"dimension", r.dimension},
          {"world_origin", {r.world_origin.x, r.world_origin.y}},
          {"world_dimension", r.world_dimension},
          {"world_heading", r.world_heading},
          {"occluded_fraction", r.occluded_fraction}};
}

LabelRecord label_from_json(const nlohmann::json& j) {
  LabelRecord r;
  r.label = j.at("label").get<std::string>();
  r.instance_id = j.at("instance_id").get<std::int64_t>();
  r.origin = j.at("origin").get<std::array<int, 2>>();
  r.dimension = j.at("dimension").get<std::array<int, 2>>();
  const auto wo = j.at("world_origin").get<std::array<double, 2>>();
  r.world_origin = {wo[0], wo[1]};
  r.world_dimension = j.at("world_dimension").get<std::array<double, 2>>();
  r.world_heading = j.at("world_heading").get<double>();
  r.occluded_fraction = j.at("occluded_fraction").get<double>();
  return r;
}

nlohmann::json to_json(const LabelFile& f) {
  nlohmann::json labels = nlohmann::json::array();
  for (const auto& l : f.labels) labels.push_back(to_json(l));
  return {{"tick", f.tick},
          {"timestamp", f.timestamp},
          {"camera_id", f.camera_id},
          {"image_file", f.image_file},
          {"labels", std::move(labels)}};
}

LabelFile label_file_from_json(const nlohmann::json& j) {
  LabelFile f;
  f.tick = j.at("tick").get<std::uint64_t>();
  f.timestamp = j.at("timestamp").get<double>();
  f.camera_id = j.at("camera_id").get<std::string>();
  f.image_file = j.at("image_file").get<std::string>();
  for (const auto& l : j.at("labels")) f.labels.push_back(label_from_json(l));
  return f;
}

std::filesystem::path write_label_file(const LabelFile& file, const std::filesystem::path& out_dir) {
  const std::filesystem::path dir = out_dir / "labels";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  char name[32];
  std::snprintf(name, sizeof name, "%010llu.json", static_cast<unsigned long long>(file.tick));
  const std::filesystem::path path = dir / name;
  std::ofstream os(path, std::ios::binary);
  os << to_json(file).dump(2) << '\n';
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return path;
}

}  // namespace drivesim

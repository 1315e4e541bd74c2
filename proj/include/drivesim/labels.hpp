#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "drivesim/camera.hpp"
#include "drivesim/world.hpp"

namespace drivesim {

struct LabelRecord {
  std::string label;  // semantic class name
  std::int64_t instance_id = 0;
  std::array<int, 2> origin{};     // top-left pixel (x, y)
  std::array<int, 2> dimension{};  // (w, h) pixels
  geo::Vec2 world_origin;
  std::array<double, 2> world_dimension{};  // (length, width) m
  double world_heading = 0.0;
  double occluded_fraction = 0.0;

  bool operator==(const LabelRecord&) const = default;
};

/// Pixel box of an image-space polygon: floor of the minimum corner to ceil of
/// the maximum, clipped to the image. Empty (w or h = 0) when off-image.
struct PixelBox {
  int x = 0, y = 0, w = 0, h = 0;
  bool empty() const { return w <= 0 || h <= 0; }
};
PixelBox pixel_box(std::span<const geo::Vec2> image_polygon, int width, int height);

/// Boxes for every object of a target class that intersects the frame,
/// ordered as painted. Occluded objects are labeled too; occluded_fraction
/// compares visible pixels to the pixels the object would cover alone.
std::vector<LabelRecord> generate_labels(const CameraFrame& frame, const WorldView& world,
                                         const std::set<SemanticClass>& target_classes);

nlohmann::json to_json(const LabelRecord& r);
LabelRecord label_from_json(const nlohmann::json& j);

struct LabelFile {
  std::uint64_t tick = 0;
  double timestamp = 0.0;
  std::string camera_id;
  std::string image_file;
  std::vector<LabelRecord> labels;
};

nlohmann::json to_json(const LabelFile& f);
LabelFile label_file_from_json(const nlohmann::json& j);

/// Writes {out_dir}/labels/{tick:010}.json and returns its path.
std::filesystem::path write_label_file(const LabelFile& file, const std::filesystem::path& out_dir);

}  // namespace drivesim

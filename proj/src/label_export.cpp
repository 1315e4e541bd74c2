#include "drivesim/label_export.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "drivesim/labels.hpp"
#include "drivesim/png_io.hpp"

namespace drivesim {

std::set<SemanticClass> parse_class_list(const std::string& csv) {
  std::set<SemanticClass> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto c = parse_semantic_class(item);
    if (!c) throw std::invalid_argument("unknown class '" + item + "'");
    out.insert(*c);
  }
  if (out.empty()) throw std::invalid_argument("no classes given");
  return out;
}

LabelExportResult export_labels(Simulation& sim, const LabelExportOptions& options) {
  const auto& sensors = sim.scenario().sensors;
  std::optional<std::size_t> cam;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    if (!sensors[i].is_camera()) continue;
    if (!options.camera || sensors[i].id == *options.camera) {
      cam = i;
      break;
    }
  }
  if (!cam) {
    throw std::invalid_argument(options.camera ? "no camera '" + *options.camera + "' in scenario"
                                               : std::string("scenario has no camera"));
  }

  LabelExportResult result;
  result.camera_id = sensors[*cam].id;
  std::filesystem::create_directories(options.out_dir / "images");
  std::size_t script_pos = 0;
  const std::uint64_t end = sim.tick() + options.ticks;
  while (sim.tick() < end) {
    std::map<VehicleId, dyn::ControlInput> latched;
    for (; script_pos < options.script.size() && options.script[script_pos].tick <= sim.tick(); ++script_pos) {
      if (options.script[script_pos].tick == sim.tick()) {
        latched[options.script[script_pos].vehicle] = options.script[script_pos].input;
      }
    }
    const TickOutput& out = sim.step(latched);
    for (const auto& s : out.sensors) {
      if (s.config_index != *cam) continue;
      const CameraFrame& frame = *std::get<std::shared_ptr<const CameraFrame>>(s.data);
      const std::vector<Footprint> vehicles = sim.footprints();
      const WorldView view{&sim.scenario().map, vehicles};
      char name[32];
      std::snprintf(name, sizeof name, "%010llu.png", static_cast<unsigned long long>(out.tick));
      const std::string image = std::string("images/") + name;
      write_png(options.out_dir / image, frame.width_px, frame.height_px, static_cast<int>(frame.channels()),
                frame.pixels);
      LabelFile file{out.tick, out.sim_time, frame.sensor_id, image, generate_labels(frame, view, options.classes)};
      result.label_files.push_back(write_label_file(file, options.out_dir));
    }
  }
  return result;
}

}  // namespace drivesim

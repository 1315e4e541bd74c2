#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "drivesim/dataset.hpp"
#include "drivesim/scenario.hpp"
#include "drivesim/simulation.hpp"

namespace drivesim {

struct LabelExportOptions {
  std::filesystem::path out_dir;
  std::uint64_t ticks = 0;
  std::set<SemanticClass> classes;
  /// Camera to label; defaults to the first camera in the scenario.
  std::optional<std::string> camera;
  std::vector<CommandRecord> script;
};

struct LabelExportResult {
  std::vector<std::filesystem::path> label_files;
  std::string camera_id;
};

/// Headless fast-mode run writing labels/{tick}.json and images/{tick}.png
/// for every tick the camera is due. Returns the simulation for reporting.
LabelExportResult export_labels(Simulation& sim, const LabelExportOptions& options);

/// Parses "vehicle,building" into classes; throws std::invalid_argument.
std::set<SemanticClass> parse_class_list(const std::string& csv);

}  // namespace drivesim

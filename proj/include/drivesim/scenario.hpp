#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "drivesim/dynamics.hpp"
#include "drivesim/pid.hpp"
#include "drivesim/sensor_config.hpp"
#include "drivesim/world.hpp"

namespace drivesim {

struct Weather {
  double friction_scale = 1.0;     // (0, 1]
  double sensor_noise_scale = 1.0; // >= 0
};

enum class Role { ego, traffic };

struct VehicleSpec {
  VehicleId id = 0;
  Role role = Role::traffic;
  dyn::VehicleParams params;
  WaypointId initial_waypoint = 0;
  dyn::PidGains speed_pid = dyn::PidGains::default_speed();
  dyn::PidGains steer_pid = dyn::PidGains::default_steer();
};

struct Scenario {
  WorldMap map;
  Weather weather;
  std::vector<VehicleSpec> vehicles;
  std::vector<SensorConfig> sensors;
  std::uint64_t seed = 0;
  std::string hash;    // SHA-256 of the source document
  std::string source;  // raw YAML text

  std::vector<VehicleId> ego_ids() const;
  const VehicleSpec* find_vehicle(VehicleId id) const;
};

class ScenarioError : public std::runtime_error {
 public:
  enum class Kind { io, parse, validation };
  ScenarioError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Reads, parses and validates a scenario file. Throws ScenarioError naming
/// the first violated invariant and its line/column.
Scenario load_scenario(const std::filesystem::path& path);

/// Same as load_scenario for in-memory YAML.
Scenario parse_scenario(const std::string& yaml_text);

/// Checks every cross-reference and value invariant of an assembled scenario.
/// Used by the loader and by code that builds scenarios programmatically.
void validate_scenario(const Scenario& scenario);

}  // namespace drivesim

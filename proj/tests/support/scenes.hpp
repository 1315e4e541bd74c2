#pragma once

// Random scenes shared by the unit suites and the acceptance binary.

#include <cstdint>
#include <vector>

#include "drivesim/sensor_config.hpp"
#include "drivesim/world.hpp"
#include "oracles.hpp"

namespace testing {

struct RadarCase {
  drivesim::WorldMap map;
  std::vector<drivesim::Footprint> vehicles;  // vehicles[0] carries the radar
  drivesim::SensorConfig radar;
  // Independent description of the same solids for the oracle.
  std::vector<oracle::Poly> solids;
  std::vector<std::vector<oracle::Vec2>> vehicle_corners;
};

/// Radar on a vehicle at a random pose among random convex obstacles, ground
/// patches and other vehicles; fov, ray count, range and mount are random too.
RadarCase random_radar_case(std::uint64_t seed);

/// Brute-force distances for `c`: ray angles, mount composition and hits all
/// recomputed from scratch.
std::vector<double> oracle_radar(const RadarCase& c);

struct LabelScene {
  drivesim::WorldMap map;
  std::vector<drivesim::Footprint> vehicles;
  drivesim::SensorConfig camera;
  drivesim::geo::Pose2 camera_pose;
  struct Truth {
    drivesim::ObjectRef ref;
    drivesim::SemanticClass cls;
    oracle::Poly corners;  // world frame, computed without the library
  };
  std::vector<Truth> truths;
};

/// Vehicles and buildings scattered around a camera at a random pose and scale,
/// some of them straddling the image border or overlapping each other.
LabelScene random_label_scene(std::uint64_t seed);

}  // namespace testing

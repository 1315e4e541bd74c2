#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "drivesim/geometry.hpp"

namespace drivesim {

using WaypointId = std::int64_t;
using ObstacleId = std::int64_t;
using LightId = std::int64_t;
using VehicleId = std::int64_t;

/// Semantic classes double as camera class ids; the numeric values are part
/// of the published palette and must not change.
enum class SemanticClass : std::uint8_t {
  background = 0,
  road = 1,
  crosswalk = 2,
  sidewalk = 3,
  building = 4,
  vegetation = 5,
  barrier = 6,
  vehicle = 7,
  ego = 8,
};
inline constexpr int kSemanticClassCount = 9;

std::string_view to_string(SemanticClass c);
std::optional<SemanticClass> parse_semantic_class(std::string_view name);

/// Classes that block rays and collide. Ground surfaces (road, crosswalk,
/// sidewalk) are painted by cameras but are transparent to rays.
bool is_solid(SemanticClass c);

struct Waypoint {
  WaypointId id = 0;
  geo::Vec2 position;
  std::vector<WaypointId> successors;
  double speed_limit = 0.0;
  std::optional<LightId> stop_line_for;
};

struct StaticObstacle {
  ObstacleId id = 0;
  geo::Polygon polygon;
  SemanticClass semantic_class = SemanticClass::building;
  double height = 0.0;  // metadata only
};

enum class LightPhase { red, yellow, green };
std::string_view to_string(LightPhase p);

struct PhaseStep {
  LightPhase phase = LightPhase::red;
  double duration = 0.0;
};

struct TrafficLight {
  LightId id = 0;
  geo::Vec2 position;
  std::vector<PhaseStep> schedule;
  double phase_offset = 0.0;

  double cycle_length() const;
};

class WorldMap {
 public:
  std::vector<Waypoint> waypoints;
  std::vector<StaticObstacle> obstacles;
  std::vector<TrafficLight> lights;
  std::vector<geo::Pose2> spawn_points;

  /// Rebuilds the id lookup tables. Call after editing the vectors.
  void reindex();

  const Waypoint* find_waypoint(WaypointId id) const;
  const Waypoint& waypoint(WaypointId id) const;
  const TrafficLight* find_light(LightId id) const;
  const StaticObstacle* find_obstacle(ObstacleId id) const;

  /// Solid obstacles only, in id order, with cached bounds.
  struct SolidObstacle {
    std::size_t index;  // into `obstacles`
    geo::Aabb box;
  };
  std::span<const SolidObstacle> solids() const { return solids_; }

 private:
  std::unordered_map<WaypointId, std::size_t> waypoint_index_;
  std::unordered_map<LightId, std::size_t> light_index_;
  std::unordered_map<ObstacleId, std::size_t> obstacle_index_;
  std::vector<SolidObstacle> solids_;
};

/// Identifies anything a ray can hit.
struct ObjectRef {
  enum class Kind : std::uint8_t { obstacle = 0, vehicle = 1 };
  Kind kind = Kind::obstacle;
  std::int64_t id = 0;

  auto operator<=>(const ObjectRef&) const = default;

  static ObjectRef obstacle(ObstacleId id) { return {Kind::obstacle, id}; }
  static ObjectRef vehicle(VehicleId id) { return {Kind::vehicle, id}; }
};

/// Oriented vehicle rectangle as seen by other vehicles and sensors.
struct Footprint {
  VehicleId id = 0;
  SemanticClass semantic_class = SemanticClass::vehicle;
  geo::Pose2 pose;
  double length = 0.0;
  double width = 0.0;
  geo::Polygon polygon;
};

Footprint make_footprint(VehicleId id, SemanticClass cls, const geo::Pose2& pose, double length, double width);

/// Immutable snapshot used by every spatial query: the static map plus the
/// vehicle footprints of one tick.
struct WorldView {
  const WorldMap* map = nullptr;
  std::span<const Footprint> vehicles;
};

struct RayHit {
  double distance = 0.0;
  ObjectRef object;
};

/// Nearest hit among solid obstacles and vehicle footprints not in `exclude`.
/// `direction` must be unit length; rays starting inside an object report 0.
std::optional<RayHit> cast_ray(const WorldView& world, const geo::Vec2& origin, const geo::Vec2& direction,
                               double max_range, std::span<const ObjectRef> exclude = {});

/// Angle of ray `i` of an `n_rays` fan spread evenly over [heading - fov/2,
/// heading + fov/2], both ends included.
double sector_ray_angle(double heading, double fov, int n_rays, int i);

/// Per-ray distances of a fan; misses read `max_range`.
std::vector<double> sector_scan(const WorldView& world, const geo::Pose2& pose, double fov, double max_range,
                                int n_rays, std::span<const ObjectRef> exclude = {});

/// Interior intersection of a vehicle rectangle with another footprint or
/// polygon.
bool overlap(const Footprint& a, std::span<const geo::Vec2> b);

}  // namespace drivesim

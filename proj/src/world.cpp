#include "drivesim/world.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace drivesim {

std::string_view to_string(SemanticClass c) {
  switch (c) {
    case SemanticClass::background: return "background";
    case SemanticClass::road: return "road";
    case SemanticClass::crosswalk: return "crosswalk";
    case SemanticClass::sidewalk: return "sidewalk";
    case SemanticClass::building: return "building";
    case SemanticClass::vegetation: return "vegetation";
    case SemanticClass::barrier: return "barrier";
    case SemanticClass::vehicle: return "vehicle";
    case SemanticClass::ego: return "ego";
  }
  return "background";
}

std::optional<SemanticClass> parse_semantic_class(std::string_view name) {
  for (int i = 0; i < kSemanticClassCount; ++i) {
    const auto c = static_cast<SemanticClass>(i);
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

bool is_solid(SemanticClass c) {
  switch (c) {
    case SemanticClass::building:
    case SemanticClass::vegetation:
    case SemanticClass::barrier:
    case SemanticClass::vehicle:
    case SemanticClass::ego:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(LightPhase p) {
  switch (p) {
    case LightPhase::red: return "red";
    case LightPhase::yellow: return "yellow";
    case LightPhase::green: return "green";
  }
  return "red";
}

double TrafficLight::cycle_length() const {
  double total = 0.0;
  for (const auto& step : schedule) total += step.duration;
  return total;
}

void WorldMap::reindex() {
  waypoint_index_.clear();
  light_index_.clear();
  obstacle_index_.clear();
  for (std::size_t i = 0; i < waypoints.size(); ++i) waypoint_index_[waypoints[i].id] = i;
  for (std::size_t i = 0; i < lights.size(); ++i) light_index_[lights[i].id] = i;
  for (std::size_t i = 0; i < obstacles.size(); ++i) obstacle_index_[obstacles[i].id] = i;

  solids_.clear();
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    if (is_solid(obstacles[i].semantic_class)) solids_.push_back({i, geo::bounds(obstacles[i].polygon)});
  }
  std::sort(solids_.begin(), solids_.end(), [this](const SolidObstacle& a, const SolidObstacle& b) {
    return obstacles[a.index].id < obstacles[b.index].id;
  });
}

const Waypoint* WorldMap::find_waypoint(WaypointId id) const {
  auto it = waypoint_index_.find(id);
  return it == waypoint_index_.end() ? nullptr : &waypoints[it->second];
}

const Waypoint& WorldMap::waypoint(WaypointId id) const {
  const Waypoint* wp = find_waypoint(id);
  if (!wp) throw std::out_of_range("unknown waypoint " + std::to_string(id));
  return *wp;
}

const TrafficLight* WorldMap::find_light(LightId id) const {
  auto it = light_index_.find(id);
  return it == light_index_.end() ? nullptr : &lights[it->second];
}

const StaticObstacle* WorldMap::find_obstacle(ObstacleId id) const {
  auto it = obstacle_index_.find(id);
  return it == obstacle_index_.end() ? nullptr : &obstacles[it->second];
}

Footprint make_footprint(VehicleId id, SemanticClass cls, const geo::Pose2& pose, double length, double width) {
  return {id, cls, pose, length, width, geo::oriented_rect(pose, length, width)};
}

namespace {

bool excluded(std::span<const ObjectRef> exclude, const ObjectRef& ref) {
  return std::find(exclude.begin(), exclude.end(), ref) != exclude.end();
}

// Slab test: can a ray segment of length max_range reach the box at all?
bool ray_reaches_box(const geo::Vec2& o, const geo::Vec2& d, double max_range, const geo::Aabb& box) {
  double t0 = 0.0;
  double t1 = max_range;
  const double od[2] = {o.x, o.y};
  const double dd[2] = {d.x, d.y};
  const double lo[2] = {box.min.x, box.min.y};
  const double hi[2] = {box.max.x, box.max.y};
  for (int k = 0; k < 2; ++k) {
    if (dd[k] == 0.0) {
      if (od[k] < lo[k] || od[k] > hi[k]) return false;
      continue;
    }
    double ta = (lo[k] - od[k]) / dd[k];
    double tb = (hi[k] - od[k]) / dd[k];
    if (ta > tb) std::swap(ta, tb);
    // Small slack so edge-grazing rays still reach the exact test.
    const double slack = 1e-9 * (1.0 + std::abs(ta) + std::abs(tb));
    t0 = std::max(t0, ta - slack);
    t1 = std::min(t1, tb + slack);
    if (t0 > t1) return false;
  }
  return true;
}

void consider(std::optional<RayHit>& best, double t, const ObjectRef& ref) {
  if (!best || t < best->distance || (t == best->distance && ref < best->object)) best = RayHit{t, ref};
}

}  // namespace

std::optional<RayHit> cast_ray(const WorldView& world, const geo::Vec2& origin, const geo::Vec2& direction,
                               double max_range, std::span<const ObjectRef> exclude) {
  assert(std::abs(geo::norm(direction) - 1.0) <= 1e-9);
  assert(max_range > 0.0);
  std::optional<RayHit> best;
  if (world.map) {
    for (const auto& solid : world.map->solids()) {
      const StaticObstacle& obstacle = world.map->obstacles[solid.index];
      const ObjectRef ref = ObjectRef::obstacle(obstacle.id);
      if (excluded(exclude, ref)) continue;
      if (!ray_reaches_box(origin, direction, max_range, solid.box)) continue;
      if (auto t = geo::ray_polygon(origin, direction, obstacle.polygon)) consider(best, *t, ref);
    }
  }
  for (const auto& fp : world.vehicles) {
    const ObjectRef ref = ObjectRef::vehicle(fp.id);
    if (excluded(exclude, ref)) continue;
    if (auto t = geo::ray_polygon(origin, direction, fp.polygon)) consider(best, *t, ref);
  }
  if (best && best->distance > max_range) return std::nullopt;
  return best;
}

double sector_ray_angle(double heading, double fov, int n_rays, int i) {
  if (n_rays == 1) return heading;
  return heading - 0.5 * fov + fov * static_cast<double>(i) / static_cast<double>(n_rays - 1);
}

std::vector<double> sector_scan(const WorldView& world, const geo::Pose2& pose, double fov, double max_range,
                                int n_rays, std::span<const ObjectRef> exclude) {
  assert(fov > 0.0 && n_rays >= 1);
  std::vector<double> out(static_cast<std::size_t>(n_rays), max_range);
  for (int i = 0; i < n_rays; ++i) {
    const geo::Vec2 dir = geo::unit_from_angle(sector_ray_angle(pose.heading, fov, n_rays, i));
    if (auto hit = cast_ray(world, pose.position, dir, max_range, exclude)) out[static_cast<std::size_t>(i)] = hit->distance;
  }
  return out;
}

bool overlap(const Footprint& a, std::span<const geo::Vec2> b) { return geo::overlap(a.polygon, b); }

}  // namespace drivesim

#include "drivesim/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>

#include "drivesim/hash.hpp"

namespace drivesim {

namespace {

using Locations = std::map<std::string, YAML::Mark>;

std::string where(const YAML::Mark& mark) {
  if (mark.line < 0) return "";
  return " (line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) + ")";
}

[[noreturn]] void fail(const std::string& msg, const YAML::Mark& mark) {
  throw ScenarioError(ScenarioError::Kind::validation, msg + where(mark));
}

[[noreturn]] void fail_at(const std::string& msg, const Locations* locs, const std::string& key) {
  if (locs) {
    if (auto it = locs->find(key); it != locs->end()) fail(msg, it->second);
  }
  throw ScenarioError(ScenarioError::Kind::validation, msg);
}

void check_keys(const YAML::Node& node, std::string_view context, std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) fail(std::string(context) + " must be a mapping", node.Mark());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(std::string(context) + ": unknown key '" + key + "'", kv.first.Mark());
    }
  }
}

template <typename T>
T scalar(const YAML::Node& node, std::string_view what) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(std::string(what) + ": expected a " + (std::is_same_v<T, std::string> ? "string" : "number"), node.Mark());
  }
}

template <typename T>
T optional_scalar(const YAML::Node& parent, const char* key, T fallback, std::string_view what) {
  const YAML::Node n = parent[key];
  if (!n) return fallback;
  return scalar<T>(n, std::string(what) + "." + key);
}

template <typename T>
T required_scalar(const YAML::Node& parent, const char* key, std::string_view what) {
  const YAML::Node n = parent[key];
  if (!n) fail(std::string(what) + ": missing '" + key + "'", parent.Mark());
  return scalar<T>(n, std::string(what) + "." + key);
}

geo::Vec2 parse_point(const YAML::Node& node, std::string_view what) {
  if (!node.IsSequence() || node.size() != 2) fail(std::string(what) + ": expected [x, y]", node.Mark());
  return {scalar<double>(node[0], what), scalar<double>(node[1], what)};
}

geo::Pose2 parse_pose(const YAML::Node& node, std::string_view what) {
  if (!node.IsSequence() || node.size() != 3) fail(std::string(what) + ": expected [x, y, heading]", node.Mark());
  return {{scalar<double>(node[0], what), scalar<double>(node[1], what)}, scalar<double>(node[2], what)};
}

LightPhase parse_phase(const YAML::Node& node) {
  const auto s = scalar<std::string>(node, "phase");
  if (s == "red") return LightPhase::red;
  if (s == "yellow") return LightPhase::yellow;
  if (s == "green") return LightPhase::green;
  fail("unknown light phase '" + s + "'", node.Mark());
}

dyn::VehicleParams parse_params(const YAML::Node& node, const std::string& what) {
  dyn::VehicleParams p;
  if (!node) return p;
  check_keys(node, what,
             {"wheelbase", "mass", "length", "width", "max_steer", "max_drive_force", "max_brake_force",
              "drag_coeff", "rolling_coeff", "powertrain", "drive_mode", "ice_idle_fraction"});
  p.wheelbase = optional_scalar(node, "wheelbase", p.wheelbase, what);
  p.mass = optional_scalar(node, "mass", p.mass, what);
  p.length = optional_scalar(node, "length", p.length, what);
  p.width = optional_scalar(node, "width", p.width, what);
  p.max_steer = optional_scalar(node, "max_steer", p.max_steer, what);
  p.max_drive_force = optional_scalar(node, "max_drive_force", p.max_drive_force, what);
  p.max_brake_force = optional_scalar(node, "max_brake_force", p.max_brake_force, what);
  p.drag_coeff = optional_scalar(node, "drag_coeff", p.drag_coeff, what);
  p.rolling_coeff = optional_scalar(node, "rolling_coeff", p.rolling_coeff, what);
  p.ice_idle_fraction = optional_scalar(node, "ice_idle_fraction", p.ice_idle_fraction, what);
  if (const auto n = node["powertrain"]) {
    const auto s = scalar<std::string>(n, what + ".powertrain");
    if (s == "electric") {
      p.powertrain = dyn::Powertrain::electric;
    } else if (s == "ice") {
      p.powertrain = dyn::Powertrain::ice;
    } else {
      fail(what + ": unknown powertrain '" + s + "'", n.Mark());
    }
  }
  if (const auto n = node["drive_mode"]) {
    const auto s = scalar<std::string>(n, what + ".drive_mode");
    if (s == "front") {
      p.drive_mode = dyn::DriveMode::front;
    } else if (s == "rear") {
      p.drive_mode = dyn::DriveMode::rear;
    } else if (s == "all") {
      p.drive_mode = dyn::DriveMode::all;
    } else {
      fail(what + ": unknown drive_mode '" + s + "'", n.Mark());
    }
  }
  return p;
}

dyn::PidGains parse_gains(const YAML::Node& node, dyn::PidGains g, const std::string& what) {
  if (!node) return g;
  check_keys(node, what, {"kp", "ki", "kd", "integral_limit"});
  g.kp = optional_scalar(node, "kp", g.kp, what);
  g.ki = optional_scalar(node, "ki", g.ki, what);
  g.kd = optional_scalar(node, "kd", g.kd, what);
  g.integral_limit = optional_scalar(node, "integral_limit", g.integral_limit, what);
  return g;
}

std::string kind_topic_segment(SensorKind k) {
  switch (k) {
    case SensorKind::camera_rgb:
    case SensorKind::camera_semantic:
      return "camera";
    case SensorKind::radar: return "radar";
    case SensorKind::imu: return "imu";
    case SensorKind::gnss: return "gnss";
  }
  return "sensor";
}

SensorParams parse_sensor_params(const YAML::Node& node, SensorKind kind, const std::string& what) {
  SensorParams params = default_params(kind);
  if (!node) return params;
  switch (kind) {
    case SensorKind::radar: {
      check_keys(node, what, {"fov", "max_range", "n_rays", "noise_std"});
      auto& p = std::get<RadarParams>(params);
      p.fov = optional_scalar(node, "fov", p.fov, what);
      p.max_range = optional_scalar(node, "max_range", p.max_range, what);
      p.n_rays = optional_scalar(node, "n_rays", p.n_rays, what);
      p.noise_std = optional_scalar(node, "noise_std", p.noise_std, what);
      break;
    }
    case SensorKind::camera_rgb:
    case SensorKind::camera_semantic: {
      check_keys(node, what, {"width_px", "height_px", "meters_per_px", "palette"});
      auto& p = std::get<CameraParams>(params);
      p.width_px = optional_scalar(node, "width_px", p.width_px, what);
      p.height_px = optional_scalar(node, "height_px", p.height_px, what);
      p.meters_per_px = optional_scalar(node, "meters_per_px", p.meters_per_px, what);
      p.palette = optional_scalar(node, "palette", p.palette, what);
      break;
    }
    case SensorKind::imu: {
      check_keys(node, what, {"noise_std_accel", "noise_std_gyro"});
      auto& p = std::get<ImuParams>(params);
      p.noise_std_accel = optional_scalar(node, "noise_std_accel", p.noise_std_accel, what);
      p.noise_std_gyro = optional_scalar(node, "noise_std_gyro", p.noise_std_gyro, what);
      break;
    }
    case SensorKind::gnss: {
      check_keys(node, what, {"noise_std_m"});
      auto& p = std::get<GnssParams>(params);
      p.noise_std_m = optional_scalar(node, "noise_std_m", p.noise_std_m, what);
      break;
    }
  }
  return params;
}

Scenario parse_document(const YAML::Node& root, Locations& locs) {
  Scenario sc;
  check_keys(root, "scenario", {"map", "weather", "vehicles", "sensors", "seed"});

  sc.seed = optional_scalar<std::uint64_t>(root, "seed", 0, "seed");

  if (const auto w = root["weather"]) {
    check_keys(w, "weather", {"friction_scale", "sensor_noise_scale"});
    sc.weather.friction_scale = optional_scalar(w, "friction_scale", 1.0, "weather");
    sc.weather.sensor_noise_scale = optional_scalar(w, "sensor_noise_scale", 1.0, "weather");
    locs["weather"] = w.Mark();
  }

  const YAML::Node map = root["map"];
  if (!map) fail("scenario: missing 'map'", root.Mark());
  check_keys(map, "map", {"waypoints", "obstacles", "lights", "spawn_points"});

  if (const auto wps = map["waypoints"]) {
    if (!wps.IsSequence()) fail("map.waypoints must be a list", wps.Mark());
    for (const auto& n : wps) {
      check_keys(n, "waypoint", {"id", "x", "y", "successors", "speed_limit", "stop_line_for"});
      Waypoint wp;
      wp.id = required_scalar<WaypointId>(n, "id", "waypoint");
      const std::string what = "waypoint " + std::to_string(wp.id);
      wp.position = {required_scalar<double>(n, "x", what), required_scalar<double>(n, "y", what)};
      wp.speed_limit = required_scalar<double>(n, "speed_limit", what);
      if (const auto s = n["successors"]) {
        if (!s.IsSequence()) fail(what + ": successors must be a list", s.Mark());
        for (const auto& id : s) wp.successors.push_back(scalar<WaypointId>(id, what + ".successors"));
      }
      if (const auto s = n["stop_line_for"]; s && !s.IsNull()) wp.stop_line_for = scalar<LightId>(s, what);
      locs["waypoint:" + std::to_string(wp.id)] = n.Mark();
      sc.map.waypoints.push_back(std::move(wp));
    }
  }

  if (const auto obs = map["obstacles"]) {
    if (!obs.IsSequence()) fail("map.obstacles must be a list", obs.Mark());
    for (const auto& n : obs) {
      check_keys(n, "obstacle", {"id", "class", "height", "polygon"});
      StaticObstacle o;
      o.id = required_scalar<ObstacleId>(n, "id", "obstacle");
      const std::string what = "obstacle " + std::to_string(o.id);
      const auto cls = required_scalar<std::string>(n, "class", what);
      const auto parsed = parse_semantic_class(cls);
      if (!parsed || *parsed == SemanticClass::background || *parsed == SemanticClass::vehicle ||
          *parsed == SemanticClass::ego) {
        fail(what + ": unknown class '" + cls + "'", n["class"].Mark());
      }
      o.semantic_class = *parsed;
      o.height = optional_scalar(n, "height", 0.0, what);
      const auto poly = n["polygon"];
      if (!poly || !poly.IsSequence()) fail(what + ": polygon must be a list of [x, y]", n.Mark());
      for (const auto& p : poly) o.polygon.push_back(parse_point(p, what + ".polygon"));
      locs["obstacle:" + std::to_string(o.id)] = n.Mark();
      sc.map.obstacles.push_back(std::move(o));
    }
  }

  if (const auto lights = map["lights"]) {
    if (!lights.IsSequence()) fail("map.lights must be a list", lights.Mark());
    for (const auto& n : lights) {
      check_keys(n, "light", {"id", "x", "y", "offset", "phases"});
      TrafficLight l;
      l.id = required_scalar<LightId>(n, "id", "light");
      const std::string what = "light " + std::to_string(l.id);
      l.position = {required_scalar<double>(n, "x", what), required_scalar<double>(n, "y", what)};
      l.phase_offset = optional_scalar(n, "offset", 0.0, what);
      const auto phases = n["phases"];
      if (!phases || !phases.IsSequence()) fail(what + ": phases must be a list of [phase, duration]", n.Mark());
      for (const auto& p : phases) {
        if (!p.IsSequence() || p.size() != 2) fail(what + ": phase entry must be [phase, duration]", p.Mark());
        l.schedule.push_back({parse_phase(p[0]), scalar<double>(p[1], what + ".duration")});
      }
      locs["light:" + std::to_string(l.id)] = n.Mark();
      sc.map.lights.push_back(std::move(l));
    }
  }

  if (const auto spawns = map["spawn_points"]) {
    if (!spawns.IsSequence()) fail("map.spawn_points must be a list", spawns.Mark());
    for (const auto& n : spawns) sc.map.spawn_points.push_back(parse_pose(n, "spawn point"));
  }
  locs["spawn_points"] = map.Mark();

  if (const auto vehicles = root["vehicles"]) {
    if (!vehicles.IsSequence()) fail("vehicles must be a list", vehicles.Mark());
    VehicleId next_id = 0;
    for (const auto& n : vehicles) {
      check_keys(n, "vehicle", {"id", "role", "waypoint", "params", "pid"});
      VehicleSpec v;
      v.id = optional_scalar<VehicleId>(n, "id", next_id, "vehicle");
      next_id = v.id + 1;
      const std::string what = "vehicle " + std::to_string(v.id);
      const auto role = optional_scalar<std::string>(n, "role", "traffic", what);
      if (role == "ego") {
        v.role = Role::ego;
      } else if (role == "traffic") {
        v.role = Role::traffic;
      } else {
        fail(what + ": unknown role '" + role + "'", n["role"].Mark());
      }
      v.initial_waypoint = required_scalar<WaypointId>(n, "waypoint", what);
      v.params = parse_params(n["params"], what + ".params");
      if (const auto pid = n["pid"]) {
        check_keys(pid, what + ".pid", {"speed", "steer"});
        v.speed_pid = parse_gains(pid["speed"], v.speed_pid, what + ".pid.speed");
        v.steer_pid = parse_gains(pid["steer"], v.steer_pid, what + ".pid.steer");
      }
      locs["vehicle:" + std::to_string(v.id)] = n.Mark();
      sc.vehicles.push_back(std::move(v));
    }
  }

  if (const auto sensors = root["sensors"]) {
    if (!sensors.IsSequence()) fail("sensors must be a list", sensors.Mark());
    const auto egos = sc.ego_ids();
    for (const auto& n : sensors) {
      check_keys(n, "sensor", {"id", "kind", "vehicle", "mount", "rate_hz", "topic", "frame", "params"});
      SensorConfig s;
      s.id = required_scalar<std::string>(n, "id", "sensor");
      const std::string what = "sensor '" + s.id + "'";
      const auto kind = required_scalar<std::string>(n, "kind", what);
      const auto parsed = parse_sensor_kind(kind);
      if (!parsed) fail(what + ": unknown kind '" + kind + "'", n["kind"].Mark());
      s.kind = *parsed;
      if (const auto vn = n["vehicle"]) {
        s.vehicle = scalar<VehicleId>(vn, what + ".vehicle");
      } else if (!egos.empty()) {
        s.vehicle = egos.front();
      } else {
        fail(what + ": no ego vehicle to mount on", n.Mark());
      }
      if (const auto m = n["mount"]) s.mount = parse_pose(m, what + ".mount");
      s.rate_hz = required_scalar<double>(n, "rate_hz", what);
      s.topic = optional_scalar<std::string>(
          n, "topic", "/ego/" + std::to_string(s.vehicle) + "/" + kind_topic_segment(s.kind) + "/" + s.id, what);
      s.frame = optional_scalar<std::string>(n, "frame", s.id, what);
      s.params = parse_sensor_params(n["params"], s.kind, what + ".params");
      locs["sensor:" + s.id] = n.Mark();
      sc.sensors.push_back(std::move(s));
    }
  }

  return sc;
}

void validate(const Scenario& sc, const Locations* locs) {
  const auto& map = sc.map;
  auto finite = [](double v) { return std::isfinite(v); };

  std::set<WaypointId> wp_ids;
  std::set<LightId> light_ids;
  for (const auto& l : map.lights) {
    const std::string key = "light:" + std::to_string(l.id);
    const std::string what = "light " + std::to_string(l.id);
    if (!light_ids.insert(l.id).second) fail_at(what + ": duplicate id", locs, key);
    if (!geo::is_finite(l.position) || !finite(l.phase_offset)) fail_at(what + ": non-finite value", locs, key);
    if (l.schedule.empty()) fail_at(what + ": empty phase schedule", locs, key);
    for (const auto& step : l.schedule) {
      if (!(step.duration > 0.0) || !finite(step.duration)) {
        fail_at(what + ": phase durations must be > 0", locs, key);
      }
    }
  }
  for (const auto& wp : map.waypoints) {
    const std::string key = "waypoint:" + std::to_string(wp.id);
    if (!wp_ids.insert(wp.id).second) fail_at("waypoint " + std::to_string(wp.id) + ": duplicate id", locs, key);
  }
  for (const auto& wp : map.waypoints) {
    const std::string key = "waypoint:" + std::to_string(wp.id);
    const std::string what = "waypoint " + std::to_string(wp.id);
    if (!geo::is_finite(wp.position)) fail_at(what + ": non-finite position", locs, key);
    if (!(wp.speed_limit > 0.0) || !finite(wp.speed_limit)) fail_at(what + ": speed_limit must be > 0", locs, key);
    if (wp.successors.empty()) fail_at(what + ": no successors (agents would dead-end)", locs, key);
    for (const auto s : wp.successors) {
      if (!wp_ids.contains(s)) fail_at(what + " → unknown successor " + std::to_string(s), locs, key);
      if (s == wp.id) fail_at(what + ": successor is itself", locs, key);
    }
    if (wp.stop_line_for && !light_ids.contains(*wp.stop_line_for)) {
      fail_at(what + " → unknown light " + std::to_string(*wp.stop_line_for), locs, key);
    }
  }

  std::set<ObstacleId> obstacle_ids;
  for (const auto& o : map.obstacles) {
    const std::string key = "obstacle:" + std::to_string(o.id);
    const std::string what = "obstacle " + std::to_string(o.id);
    if (!obstacle_ids.insert(o.id).second) fail_at(what + ": duplicate id", locs, key);
    if (o.polygon.size() < 3) fail_at(what + ": polygon needs at least 3 vertices", locs, key);
    for (const auto& p : o.polygon) {
      if (!geo::is_finite(p)) fail_at(what + ": non-finite vertex", locs, key);
    }
    if (!geo::is_simple(o.polygon)) fail_at(what + ": polygon is not simple", locs, key);
    if (!geo::is_counterclockwise(o.polygon)) fail_at(what + ": polygon must be counterclockwise", locs, key);
    if (!(o.height >= 0.0)) fail_at(what + ": height must be >= 0", locs, key);
  }

  if (map.spawn_points.empty()) fail_at("map: at least one spawn point is required", locs, "spawn_points");
  for (const auto& sp : map.spawn_points) {
    if (!geo::is_finite(sp.position) || !finite(sp.heading)) fail_at("map: non-finite spawn point", locs, "spawn_points");
  }

  if (!(sc.weather.friction_scale > 0.0 && sc.weather.friction_scale <= 1.0)) {
    fail_at("weather.friction_scale must be in (0, 1]", locs, "weather");
  }
  if (!(sc.weather.sensor_noise_scale >= 0.0) || !finite(sc.weather.sensor_noise_scale)) {
    fail_at("weather.sensor_noise_scale must be >= 0", locs, "weather");
  }

  std::set<VehicleId> vehicle_ids;
  for (const auto& v : sc.vehicles) {
    const std::string key = "vehicle:" + std::to_string(v.id);
    const std::string what = "vehicle " + std::to_string(v.id);
    if (v.id < 0) fail_at(what + ": id must be >= 0", locs, key);
    if (!vehicle_ids.insert(v.id).second) fail_at(what + ": duplicate id", locs, key);
    if (!wp_ids.contains(v.initial_waypoint)) {
      fail_at(what + " → unknown waypoint " + std::to_string(v.initial_waypoint), locs, key);
    }
    const auto& p = v.params;
    for (double x : {p.wheelbase, p.mass, p.length, p.width, p.max_drive_force, p.max_brake_force}) {
      if (!(x > 0.0) || !finite(x)) fail_at(what + ": physical parameters must be > 0", locs, key);
    }
    if (!(p.drag_coeff > 0.0) || !(p.rolling_coeff >= 0.0)) {
      fail_at(what + ": drag_coeff must be > 0 and rolling_coeff >= 0", locs, key);
    }
    if (!(p.max_steer > 0.0 && p.max_steer < std::numbers::pi / 2.0)) {
      fail_at(what + ": max_steer must be in (0, pi/2)", locs, key);
    }
    if (!(p.ice_idle_fraction >= 0.0 && p.ice_idle_fraction < 1.0)) {
      fail_at(what + ": ice_idle_fraction must be in [0, 1)", locs, key);
    }
    for (const auto* g : {&v.speed_pid, &v.steer_pid}) {
      if (!(g->kp >= 0.0 && g->ki >= 0.0 && g->kd >= 0.0 && g->integral_limit >= 0.0)) {
        fail_at(what + ": PID gains must be >= 0", locs, key);
      }
    }
  }

  std::set<std::string> sensor_ids;
  std::set<std::string> topics;
  std::map<VehicleId, int> rgb_height;
  for (const auto& s : sc.sensors) {
    const std::string key = "sensor:" + s.id;
    const std::string what = "sensor '" + s.id + "'";
    if (s.id.empty()) fail_at("sensor: empty id", locs, key);
    if (!sensor_ids.insert(s.id).second) fail_at(what + ": duplicate id", locs, key);
    for (const char ch : s.id) {
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-')) {
        fail_at(what + ": id may only contain letters, digits, '_' and '-'", locs, key);
      }
    }
    if (s.topic.empty() || s.topic.front() != '/') fail_at(what + ": topic must start with '/'", locs, key);
    if (!topics.insert(s.topic).second) fail_at(what + ": duplicate topic " + s.topic, locs, key);
    if (!(s.rate_hz > 0.0) || !finite(s.rate_hz)) fail_at(what + ": rate_hz must be > 0", locs, key);
    const auto* host = sc.find_vehicle(s.vehicle);
    if (!host || host->role != Role::ego) {
      fail_at(what + " → vehicle " + std::to_string(s.vehicle) + " is not an ego", locs, key);
    }
    if (!geo::is_finite(s.mount.position) || !finite(s.mount.heading)) fail_at(what + ": non-finite mount", locs, key);
    switch (s.kind) {
      case SensorKind::radar: {
        const auto& p = s.radar();
        if (!(p.fov > 0.0 && p.fov <= 2.0 * std::numbers::pi)) fail_at(what + ": fov must be in (0, 2pi]", locs, key);
        if (!(p.max_range > 0.0)) fail_at(what + ": max_range must be > 0", locs, key);
        if (p.n_rays < 1) fail_at(what + ": n_rays must be >= 1", locs, key);
        if (!(p.noise_std >= 0.0)) fail_at(what + ": noise_std must be >= 0", locs, key);
        break;
      }
      case SensorKind::camera_rgb:
      case SensorKind::camera_semantic: {
        const auto& p = s.camera();
        if (s.kind == SensorKind::camera_rgb) {
          // rgb frames of one ego are concatenated side by side
          auto [it, fresh] = rgb_height.emplace(s.vehicle, p.height_px);
          if (!fresh && it->second != p.height_px) {
            fail_at(what + ": rgb cameras on one vehicle must share height_px", locs, key);
          }
        }
        if (p.width_px < 1 || p.height_px < 1) fail_at(what + ": image size must be positive", locs, key);
        if (!(p.meters_per_px > 0.0)) fail_at(what + ": meters_per_px must be > 0", locs, key);
        if (p.palette != "default") fail_at(what + ": unknown palette '" + p.palette + "'", locs, key);
        break;
      }
      case SensorKind::imu: {
        const auto& p = s.imu();
        if (!(p.noise_std_accel >= 0.0 && p.noise_std_gyro >= 0.0)) fail_at(what + ": noise must be >= 0", locs, key);
        break;
      }
      case SensorKind::gnss:
        if (!(s.gnss().noise_std_m >= 0.0)) fail_at(what + ": noise must be >= 0", locs, key);
        break;
    }
  }
}

}  // namespace

std::vector<VehicleId> Scenario::ego_ids() const {
  std::vector<VehicleId> out;
  for (const auto& v : vehicles) {
    if (v.role == Role::ego) out.push_back(v.id);
  }
  return out;
}

const VehicleSpec* Scenario::find_vehicle(VehicleId id) const {
  for (const auto& v : vehicles) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

Scenario parse_scenario(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(ScenarioError::Kind::parse, std::string("malformed YAML: ") + e.what());
  }
  if (!root || !root.IsMap()) throw ScenarioError(ScenarioError::Kind::parse, "scenario must be a YAML mapping");

  Locations locs;
  Scenario sc = parse_document(root, locs);
  validate(sc, &locs);
  sc.map.reindex();
  sc.source = yaml_text;
  sc.hash = sha256_hex(yaml_text);
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(ScenarioError::Kind::io, "cannot read scenario " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(e.kind(), path.string() + ": " + e.what());
  }
}

void validate_scenario(const Scenario& scenario) { validate(scenario, nullptr); }

}  // namespace drivesim

#include "drivesim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace drivesim::traffic {

LightPhaseState light_phase(const TrafficLight& light, double t) {
  const double cycle = light.cycle_length();
  double tau = std::fmod(t + light.phase_offset, cycle);
  if (tau < 0.0) tau += cycle;
  for (const auto& step : light.schedule) {
    if (tau < step.duration) return {light.id, step.phase, tau};
    tau -= step.duration;
  }
  // Rounding can leave tau a hair past the last boundary; that instant is the
  // start of the next cycle.
  return {light.id, light.schedule.front().phase, 0.0};
}

std::vector<LightPhaseState> light_phases(const WorldMap& map, double t) {
  std::vector<LightPhaseState> out;
  out.reserve(map.lights.size());
  for (const auto& l : map.lights) out.push_back(light_phase(l, t));
  return out;
}

Footprint TrafficAgent::footprint() const {
  return make_footprint(id, SemanticClass::vehicle, state.pose, params.length, params.width);
}

namespace {

WaypointId pick_successor(const Waypoint& wp, Rng& rng) {
  return wp.successors[static_cast<std::size_t>(rng.index(wp.successors.size()))];
}

double bearing(const geo::Vec2& from, const geo::Vec2& to) { return std::atan2(to.y - from.y, to.x - from.x); }

geo::Vec2 edge_direction(const WorldMap& map, WaypointId from, WaypointId to) {
  const geo::Vec2 d = map.waypoint(to).position - map.waypoint(from).position;
  const double n = geo::norm(d);
  return n > 0.0 ? d * (1.0 / n) : geo::Vec2{1.0, 0.0};
}

const LightPhaseState* find_phase(std::span<const LightPhaseState> lights, LightId id) {
  for (const auto& l : lights) {
    if (l.light == id) return &l;
  }
  return nullptr;
}

// Brake fraction that decelerates from `speed` to rest within `available`
// meters, counting the drive force still present at zero throttle.
double required_brake(const dyn::VehicleParams& p, double speed, double available, double friction_scale) {
  if (available <= 0.05) return 1.0;
  const double decel = speed * speed / (2.0 * available);
  const double creep = dyn::powertrain_force(p, 0.0, speed) * friction_scale;
  const double force = p.mass * decel + creep;
  return std::clamp(force / (p.max_brake_force * friction_scale), 0.0, 1.0);
}

// Nearest graph edge to a point; ties resolve by (from, to) id order.
std::pair<WaypointId, WaypointId> nearest_edge(const WorldMap& map, const geo::Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  std::pair<WaypointId, WaypointId> out{map.waypoints.front().id, map.waypoints.front().successors.front()};
  std::vector<const Waypoint*> ordered;
  for (const auto& wp : map.waypoints) ordered.push_back(&wp);
  std::sort(ordered.begin(), ordered.end(), [](const Waypoint* a, const Waypoint* b) { return a->id < b->id; });
  for (const Waypoint* wp : ordered) {
    std::vector<WaypointId> succ = wp->successors;
    std::sort(succ.begin(), succ.end());
    for (const auto s : succ) {
      const geo::Vec2 a = wp->position;
      const geo::Vec2 b = map.waypoint(s).position;
      const geo::Vec2 ab = b - a;
      const double len2 = geo::dot(ab, ab);
      const double t = len2 > 0.0 ? std::clamp(geo::dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
      const double d = geo::distance(p, a + ab * t);
      if (d < best) {
        best = d;
        out = {wp->id, s};
      }
    }
  }
  return out;
}

}  // namespace

TrafficAgent make_agent(const VehicleSpec& spec, const WorldMap& map, std::uint64_t root_seed) {
  TrafficAgent a;
  a.id = spec.id;
  a.params = spec.params;
  a.speed_gains = spec.speed_pid;
  a.steer_gains = spec.steer_pid;
  a.speed_pid = dyn::PidController(spec.speed_pid);
  a.steer_pid = dyn::PidController(spec.steer_pid);
  a.rng = Rng::substream(root_seed, "traffic", static_cast<std::uint64_t>(spec.id), 0);
  const Waypoint& start = map.waypoint(spec.initial_waypoint);
  a.current_wp = start.id;
  a.next_wp = pick_successor(start, a.rng);
  a.state.pose = {start.position, bearing(start.position, map.waypoint(a.next_wp).position)};
  return a;
}

double stop_line_distance(const WorldMap& map, WaypointId from_wp, WaypointId stop_wp, const geo::Vec2& point) {
  const geo::Vec2 dir = edge_direction(map, from_wp, stop_wp);
  return geo::dot(map.waypoint(stop_wp).position - point, dir);
}

std::vector<SimEvent> advance_agent(TrafficAgent& agent, const WorldView& world,
                                    std::span<const LightPhaseState> lights, const Weather& weather,
                                    const TrafficConfig& config, double dt, std::uint64_t tick) {
  std::vector<SimEvent> events;
  const WorldMap& map = *world.map;
  const geo::Vec2 pos = agent.state.pose.position;
  const geo::Vec2 bumper = dyn::front_bumper(agent.state, agent.params);

  // (1) Waypoint progression. Stop-line waypoints are passed when the front
  // bumper crosses the line; others on capture radius or once behind us.
  {
    const Waypoint& next = map.waypoint(agent.next_wp);
    bool reached;
    if (next.stop_line_for) {
      reached = stop_line_distance(map, agent.current_wp, next.id, bumper) <= 0.0;
    } else {
      reached = geo::distance(pos, next.position) < config.capture_radius ||
                geo::dot(next.position - pos, edge_direction(map, agent.current_wp, next.id)) <= 0.0;
    }
    if (reached) {
      agent.current_wp = next.id;
      agent.next_wp = pick_successor(next, agent.rng);
      if (agent.committed_through == next.id) agent.committed_through.reset();
      events.push_back({tick, "waypoint_advanced", {agent.id, next.id}, {{"next", agent.next_wp}}});
    }
  }

  // (2) Nominal targets.
  const Waypoint& cur = map.waypoint(agent.current_wp);
  const Waypoint& next = map.waypoint(agent.next_wp);
  const double target_heading = bearing(pos, next.position);
  double target_speed = std::min(cur.speed_limit, next.speed_limit);
  const double v = agent.state.speed;
  Halt halt = Halt::none;
  double forced_brake = 0.0;
  std::optional<LightId> halted_light;

  // (3) Red/yellow gate on the stop line ahead.
  if (next.stop_line_for) {
    const LightPhaseState* ph = find_phase(lights, *next.stop_line_for);
    if (ph && ph->phase != LightPhase::green) {
      const double d = stop_line_distance(map, agent.current_wp, next.id, bumper);
      const double a_cap = dyn::brake_capability(agent.params, weather.friction_scale);
      const double braking_distance = v * v / (2.0 * a_cap);
      if (agent.committed_through == next.id && ph->phase == LightPhase::red && d > braking_distance) {
        agent.committed_through.reset();  // slowed enough to stop after all
      }
      if (agent.committed_through != next.id) {
        if (ph->phase == LightPhase::yellow && d < braking_distance) {
          agent.committed_through = next.id;
        } else if (agent.halt == Halt::light ||  // stays halted until green
                    d < braking_distance + config.stop_margin) {
          target_speed = 0.0;
          halt = Halt::light;
          halted_light = *next.stop_line_for;
          forced_brake = required_brake(agent.params, v, d - config.stop_buffer, weather.friction_scale);
        }
      }
    } else {
      agent.committed_through.reset();
    }
  }

  // (4) Forward ray from the bumper.
  {
    const ObjectRef self = ObjectRef::vehicle(agent.id);
    const auto hit = cast_ray(world, bumper, geo::unit_from_angle(agent.state.pose.heading), config.ray_range,
                              std::span<const ObjectRef>(&self, 1));
    if (hit && hit->distance < config.obstacle_threshold(v)) {
      target_speed = 0.0;
      if (halt == Halt::none) halt = Halt::obstacle;
      forced_brake = std::max(forced_brake, required_brake(agent.params, v, hit->distance - config.obstacle_standoff,
                                                           weather.friction_scale));
    }
  }

  if (halt != agent.halt) {
    if (halt == Halt::light) events.push_back({tick, "halted_for_light", {agent.id, *halted_light}, {}});
    if (halt == Halt::obstacle) events.push_back({tick, "halted_for_obstacle", {agent.id}, {}});
    agent.halt = halt;
  }

  // (5) Tracking controllers, then the vehicle step.
  dyn::ControlInput input =
      dyn::speed_tracking_input(agent.speed_pid, agent.steer_pid, target_speed, target_heading, agent.state, dt);
  if (target_speed == 0.0) {
    input.throttle = 0.0;
    input.brake = std::max(input.brake, forced_brake);
  }
  agent.last_input = input;
  agent.state = dyn::step_vehicle(agent.state, agent.params, input, weather.friction_scale, dt);
  return events;
}

std::vector<SimEvent> detect_and_respawn(std::vector<TrafficAgent>& agents, std::span<const Footprint> egos,
                                         const WorldMap& map, std::uint64_t root_seed, std::uint64_t tick) {
  std::vector<SimEvent> events;

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (agents[i].active) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return agents[a].id < agents[b].id; });

  std::vector<Footprint> fps;
  fps.reserve(order.size());
  for (const auto i : order) fps.push_back(agents[i].footprint());

  std::set<std::size_t> involved;  // positions in `order`
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      if (overlap(fps[a], fps[b].polygon)) {
        events.push_back({tick, "collision", {fps[a].id, fps[b].id}, {}});
        involved.insert(a);
        involved.insert(b);
      }
    }
    for (const auto& ego : egos) {
      if (overlap(fps[a], ego.polygon)) {
        events.push_back({tick, "collision", {fps[a].id, ego.id}, {}});
        involved.insert(a);
      }
    }
    for (const auto& solid : map.solids()) {
      const auto& obstacle = map.obstacles[solid.index];
      if (overlap(fps[a], obstacle.polygon)) {
        events.push_back({tick, "collision", {fps[a].id}, {{"obstacle", obstacle.id}}});
        involved.insert(a);
      }
    }
  }
  if (involved.empty()) return events;

  // Spawn points ranked farthest-from-nearest-ego first, index breaking ties.
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t s = 0; s < map.spawn_points.size(); ++s) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& ego : egos) d = std::min(d, geo::distance(ego.pose.position, map.spawn_points[s].position));
    ranked.emplace_back(d, s);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.first > y.first; });

  // Occupied space: everything not being relocated, plus placements made so far.
  std::vector<Footprint> occupied(egos.begin(), egos.end());
  for (std::size_t a = 0; a < order.size(); ++a) {
    if (!involved.contains(a)) occupied.push_back(fps[a]);
  }
  std::set<std::size_t> used_spawns;

  for (const auto a : involved) {
    TrafficAgent& agent = agents[order[a]];
    std::optional<std::size_t> chosen;
    for (const auto& [dist, s] : ranked) {
      if (used_spawns.contains(s)) continue;
      const Footprint candidate = make_footprint(agent.id, SemanticClass::vehicle, map.spawn_points[s],
                                                 agent.params.length, agent.params.width);
      bool free = true;
      for (const auto& o : occupied) {
        if (overlap(candidate, o.polygon)) {
          free = false;
          break;
        }
      }
      for (std::size_t k = 0; free && k < map.solids().size(); ++k) {
        if (overlap(candidate, map.obstacles[map.solids()[k].index].polygon)) free = false;
      }
      if (free) {
        chosen = s;
        occupied.push_back(candidate);
        break;
      }
    }
    if (!chosen) {
      agent.active = false;
      events.push_back({tick, "despawned", {agent.id}, {}});
      continue;
    }
    used_spawns.insert(*chosen);
    const geo::Pose2 pose = map.spawn_points[*chosen];
    const auto [from, to] = nearest_edge(map, pose.position);
    agent.generation += 1;
    agent.rng = Rng::substream(root_seed, "traffic", static_cast<std::uint64_t>(agent.id), agent.generation);
    agent.state = dyn::VehicleState{};
    agent.state.pose = {pose.position, geo::normalize_angle(pose.heading)};
    agent.current_wp = from;
    agent.next_wp = to;
    agent.speed_pid = dyn::PidController(agent.speed_gains);
    agent.steer_pid = dyn::PidController(agent.steer_gains);
    agent.last_input = {};
    agent.halt = Halt::none;
    agent.committed_through.reset();
    events.push_back({tick, "respawned", {agent.id}, {{"spawn_point", *chosen}}});
  }
  return events;
}

}  // namespace drivesim::traffic

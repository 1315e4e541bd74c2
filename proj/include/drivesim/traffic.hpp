#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "drivesim/dynamics.hpp"
#include "drivesim/events.hpp"
#include "drivesim/pid.hpp"
#include "drivesim/rng.hpp"
#include "drivesim/scenario.hpp"
#include "drivesim/world.hpp"

namespace drivesim::traffic {

struct LightPhaseState {
  LightId light = 0;
  LightPhase phase = LightPhase::green;
  double time_into_phase = 0.0;

  bool operator==(const LightPhaseState&) const = default;
};

/// Phase of `light` at simulation time t: ((t + offset) mod cycle) walked
/// through the schedule.
LightPhaseState light_phase(const TrafficLight& light, double t);

std::vector<LightPhaseState> light_phases(const WorldMap& map, double t);

struct TrafficConfig {
  double capture_radius = 2.0;  // m
  double stop_margin = 1.0;     // m, added to the braking envelope
  double stop_buffer = 0.3;     // m, where a gated agent aims to stop short of the line
  double ray_range = 30.0;      // m
  double d_min = 8.0;           // m, standstill obstacle threshold
  double t_headway = 1.5;       // s
  double obstacle_standoff = 2.0;  // m, forced-braking target short of an obstacle

  /// Forward-ray stopping threshold d_min + v * t_headway.
  double obstacle_threshold(double speed) const { return d_min + speed * t_headway; }
};

enum class Halt { none, light, obstacle };

struct TrafficAgent {
  VehicleId id = 0;
  dyn::VehicleParams params;
  dyn::VehicleState state;
  WaypointId current_wp = 0;
  WaypointId next_wp = 0;
  dyn::PidController speed_pid;
  dyn::PidController steer_pid;
  dyn::PidGains speed_gains;
  dyn::PidGains steer_gains;
  Rng rng;
  std::uint64_t generation = 0;  // bumped on every respawn; keys the rng substream
  dyn::ControlInput last_input;
  Halt halt = Halt::none;
  /// Stop waypoint the agent decided to pass on yellow.
  std::optional<WaypointId> committed_through;
  bool active = true;

  Footprint footprint() const;
};

/// Agent parked on its initial waypoint, facing a successor drawn from its
/// substream.
TrafficAgent make_agent(const VehicleSpec& spec, const WorldMap& map, std::uint64_t root_seed);

/// Signed distance from `point` to the stop line of `stop_wp` (the line through
/// the waypoint perpendicular to the edge from `from_wp`); positive before the line.
double stop_line_distance(const WorldMap& map, WaypointId from_wp, WaypointId stop_wp, const geo::Vec2& point);

/// One control-and-motion step: waypoint progression, light gate, forward-ray
/// avoidance, PID tracking, then the vehicle step. `world` is the previous-tick
/// snapshot and must contain this agent's own footprint (excluded from the ray).
std::vector<SimEvent> advance_agent(TrafficAgent& agent, const WorldView& world,
                                    std::span<const LightPhaseState> lights, const Weather& weather,
                                    const TrafficConfig& config, double dt, std::uint64_t tick);

/// Finds overlaps involving traffic agents and relocates them to free spawn
/// points, farthest from the egos first. Egos are never moved.
std::vector<SimEvent> detect_and_respawn(std::vector<TrafficAgent>& agents, std::span<const Footprint> egos,
                                         const WorldMap& map, std::uint64_t root_seed, std::uint64_t tick);

}  // namespace drivesim::traffic

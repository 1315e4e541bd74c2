#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "drivesim/camera.hpp"
#include "drivesim/dynamics.hpp"
#include "drivesim/world.hpp"

namespace drivesim {

inline constexpr int kRoadFeatures = 4;
inline constexpr int kVehicleFeatures = 7;
inline constexpr int kNavWaypoints = 5;
inline constexpr int kNavFeatures = 2 * kNavWaypoints;

/// Position of an ego on the waypoint graph, following successors[0].
struct EgoRoute {
  WaypointId current_wp = 0;
  WaypointId next_wp = 0;
};

/// Route starting at `wp` toward its first successor.
EgoRoute start_route(const WorldMap& map, WaypointId wp);

/// Advances past the next waypoint once within `capture_radius` of it or past
/// the perpendicular through it. Returns true on advance.
bool update_route(EgoRoute& route, const WorldMap& map, const geo::Vec2& position, double capture_radius);

struct Observation {
  int height = 0;
  int width = 0;  // sum of camera widths
  std::vector<std::uint8_t> C;  // height x width x 3, row-major
  /// distance to next waypoint, signed lateral offset (left +), heading
  /// error (edge heading - vehicle heading), edge speed limit.
  std::array<double, kRoadFeatures> R{};
  /// v, accel_long, accel_lat, yaw_rate, steer, throttle, brake.
  std::array<double, kVehicleFeatures> V{};
  /// (bearing relative to heading, distance) for the next five route
  /// waypoints, interleaved.
  std::array<double, kNavFeatures> N{};

  bool operator==(const Observation&) const = default;

  /// SHA-256 over C bytes then R, V, N as little-endian doubles.
  std::string hash() const;
};

/// Assembles o_t. `cameras` are the ego's rgb frames for this tick in config
/// order; they must share a height. Throws std::invalid_argument otherwise.
Observation build_observation(const dyn::VehicleState& state, const dyn::ControlInput& applied,
                              const EgoRoute& route, const WorldMap& map,
                              std::span<const CameraFrame* const> cameras);

/// Keeps the last `history_len` observations; `stacked` returns them oldest
/// first, padding with the oldest available when fewer have been seen.
class ObservationStack {
 public:
  explicit ObservationStack(std::size_t history_len = 1);
  void push(Observation obs);
  std::vector<Observation> stacked() const;
  std::size_t history_len() const { return history_len_; }

 private:
  std::size_t history_len_;
  std::deque<Observation> items_;
};

}  // namespace drivesim

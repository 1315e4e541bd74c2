#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drivesim/dynamics.hpp"
#include "drivesim/rng.hpp"
#include "drivesim/scenario.hpp"
#include "drivesim/sensor_config.hpp"
#include "drivesim/world.hpp"

namespace drivesim {

/// True iff a sensor running at `rate_hz` produces a sample at tick k:
/// floor(k*dt*rate) > floor((k-1)*dt*rate). Tick 0 always fires.
bool is_due(double rate_hz, std::uint64_t tick, double dt);

/// Indices into `configs` of the sensors due at `tick`, in config order.
std::vector<std::size_t> schedule_due(std::span<const SensorConfig> configs, std::uint64_t tick, double dt);

struct RadarScan {
  std::string sensor_id;
  double timestamp = 0.0;
  std::vector<double> distances;
  double fov = 0.0;
  double max_range = 0.0;
};

struct ImuSample {
  std::string sensor_id;
  double timestamp = 0.0;
  double accel_x = 0.0;  // longitudinal
  double accel_y = 0.0;  // lateral, left positive
  double gyro_z = 0.0;
};

struct GnssFix {
  std::string sensor_id;
  double timestamp = 0.0;
  geo::Vec2 position;
};

/// Noise stream owned by one sensor.
Rng sensor_rng(std::uint64_t root_seed, const SensorConfig& config);

/// Sector scan from the mount pose composed onto the carrier's pose, ignoring
/// the carrier itself. `rng` is only drawn from when noise_std > 0.
RadarScan sample_radar(const SensorConfig& config, const geo::Pose2& carrier_pose, VehicleId carrier,
                       const WorldView& world, double timestamp, Rng& rng, double noise_scale);

ImuSample sample_imu(const SensorConfig& config, const dyn::VehicleState& state, const Weather& weather,
                     double timestamp, Rng& rng);

GnssFix sample_gnss(const SensorConfig& config, const dyn::VehicleState& state, const Weather& weather,
                    double timestamp, Rng& rng);

}  // namespace drivesim

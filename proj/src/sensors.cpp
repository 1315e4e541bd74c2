#include "drivesim/sensors.hpp"

#include <algorithm>
#include <cmath>

namespace drivesim {

namespace {

// The epsilon absorbs k*dt*rate landing a rounding error below an integer.
double sample_index(double rate_hz, std::int64_t tick, double dt) {
  return std::floor(static_cast<double>(tick) * dt * rate_hz + 1e-9);
}

}  // namespace

bool is_due(double rate_hz, std::uint64_t tick, double dt) {
  const auto k = static_cast<std::int64_t>(tick);
  return sample_index(rate_hz, k, dt) > sample_index(rate_hz, k - 1, dt);
}

std::vector<std::size_t> schedule_due(std::span<const SensorConfig> configs, std::uint64_t tick, double dt) {
  std::vector<std::size_t> due;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (is_due(configs[i].rate_hz, tick, dt)) due.push_back(i);
  }
  return due;
}

Rng sensor_rng(std::uint64_t root_seed, const SensorConfig& config) {
  return Rng::substream(root_seed, "sensor:" + config.id, static_cast<std::uint64_t>(config.vehicle));
}

RadarScan sample_radar(const SensorConfig& config, const geo::Pose2& carrier_pose, VehicleId carrier,
                       const WorldView& world, double timestamp, Rng& rng, double noise_scale) {
  const RadarParams& p = config.radar();
  const geo::Pose2 pose = geo::compose(carrier_pose, config.mount);
  const ObjectRef self = ObjectRef::vehicle(carrier);
  RadarScan scan{config.id, timestamp,
                 sector_scan(world, pose, p.fov, p.max_range, p.n_rays, std::span<const ObjectRef>(&self, 1)), p.fov,
                 p.max_range};
  const double sigma = p.noise_std * noise_scale;
  if (sigma > 0.0) {
    for (auto& d : scan.distances) d = std::clamp(d + sigma * rng.normal(), 0.0, p.max_range);
  }
  return scan;
}

ImuSample sample_imu(const SensorConfig& config, const dyn::VehicleState& state, const Weather& weather,
                     double timestamp, Rng& rng) {
  const ImuParams& p = config.imu();
  const double sa = p.noise_std_accel * weather.sensor_noise_scale;
  const double sg = p.noise_std_gyro * weather.sensor_noise_scale;
  ImuSample s{config.id, timestamp, state.accel_long, state.accel_lat, state.yaw_rate};
  if (sa > 0.0) {
    s.accel_x += sa * rng.normal();
    s.accel_y += sa * rng.normal();
  }
  if (sg > 0.0) s.gyro_z += sg * rng.normal();
  return s;
}

GnssFix sample_gnss(const SensorConfig& config, const dyn::VehicleState& state, const Weather& weather,
                    double timestamp, Rng& rng) {
  const double sigma = config.gnss().noise_std_m * weather.sensor_noise_scale;
  GnssFix f{config.id, timestamp, state.pose.position};
  if (sigma > 0.0) {
    f.position.x += sigma * rng.normal();
    f.position.y += sigma * rng.normal();
  }
  return f;
}

}  // namespace drivesim

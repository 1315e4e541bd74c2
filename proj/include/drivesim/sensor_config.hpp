#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "drivesim/geometry.hpp"
#include "drivesim/world.hpp"

namespace drivesim {

enum class SensorKind { camera_rgb, camera_semantic, radar, imu, gnss };

std::string_view to_string(SensorKind k);
std::optional<SensorKind> parse_sensor_kind(std::string_view s);

struct RadarParams {
  double fov = std::numbers::pi / 3.0;
  double max_range = 50.0;
  int n_rays = 16;
  double noise_std = 0.0;
};

struct CameraParams {
  int width_px = 320;
  int height_px = 640;
  double meters_per_px = 0.1;
  std::string palette = "default";
};

struct ImuParams {
  double noise_std_accel = 0.0;
  double noise_std_gyro = 0.0;
};

struct GnssParams {
  double noise_std_m = 0.0;
};

using SensorParams = std::variant<RadarParams, CameraParams, ImuParams, GnssParams>;

struct SensorConfig {
  std::string id;
  SensorKind kind = SensorKind::imu;
  VehicleId vehicle = 0;   // the ego carrying the sensor
  geo::Pose2 mount;        // relative to the vehicle body frame
  double rate_hz = 10.0;
  std::string topic;
  std::string frame;
  SensorParams params;

  bool is_camera() const { return kind == SensorKind::camera_rgb || kind == SensorKind::camera_semantic; }
  const RadarParams& radar() const { return std::get<RadarParams>(params); }
  const CameraParams& camera() const { return std::get<CameraParams>(params); }
  const ImuParams& imu() const { return std::get<ImuParams>(params); }
  const GnssParams& gnss() const { return std::get<GnssParams>(params); }
};

/// Default parameter block for a sensor kind.
SensorParams default_params(SensorKind kind);

}  // namespace drivesim

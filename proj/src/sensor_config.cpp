#include "drivesim/sensor_config.hpp"

namespace drivesim {

std::string_view to_string(SensorKind k) {
  switch (k) {
    case SensorKind::camera_rgb: return "camera_rgb";
    case SensorKind::camera_semantic: return "camera_semantic";
    case SensorKind::radar: return "radar";
    case SensorKind::imu: return "imu";
    case SensorKind::gnss: return "gnss";
  }
  return "imu";
}

std::optional<SensorKind> parse_sensor_kind(std::string_view s) {
  for (auto k : {SensorKind::camera_rgb, SensorKind::camera_semantic, SensorKind::radar, SensorKind::imu,
                 SensorKind::gnss}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

SensorParams default_params(SensorKind kind) {
  switch (kind) {
    case SensorKind::radar: return RadarParams{};
    case SensorKind::camera_rgb:
    case SensorKind::camera_semantic: return CameraParams{};
    case SensorKind::imu: return ImuParams{};
    case SensorKind::gnss: return GnssParams{};
  }
  return ImuParams{};
}

}  // namespace drivesim

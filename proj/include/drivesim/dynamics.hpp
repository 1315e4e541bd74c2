#pragma once

#include "drivesim/geometry.hpp"

namespace drivesim::dyn {

enum class Powertrain { electric, ice };
enum class DriveMode { front, rear, all };

/// Physical constants of one vehicle. Defaults describe a mid-size electric
/// sedan; the linear `rolling_coeff` lumps rolling resistance and driveline
/// losses.
struct VehicleParams {
  double wheelbase = 2.7;          // m
  double mass = 1500.0;            // kg
  double length = 4.5;             // m, footprint
  double width = 1.8;              // m, footprint
  double max_steer = 0.6;          // rad, < pi/2
  double max_drive_force = 6000.0; // N
  double max_brake_force = 12000.0;// N
  double drag_coeff = 0.4;         // N/(m/s)^2
  double rolling_coeff = 30.0;     // N/(m/s)
  Powertrain powertrain = Powertrain::electric;
  DriveMode drive_mode = DriveMode::all;
  double ice_idle_fraction = 0.05; // [0, 1)

  bool operator==(const VehicleParams&) const = default;
};

struct VehicleState {
  geo::Pose2 pose;
  double speed = 0.0;      // m/s, >= 0, body-frame longitudinal
  double yaw_rate = 0.0;   // rad/s
  double accel_long = 0.0; // m/s^2 over the last step
  double accel_lat = 0.0;  // m/s^2 over the last step

  bool operator==(const VehicleState&) const = default;
};

/// Driver command. Values are clamped on construction through `clamped`.
struct ControlInput {
  double throttle = 0.0; // [0, 1]
  double brake = 0.0;    // [0, 1]
  double steer = 0.0;    // [-1, 1], scaled to +-max_steer; positive turns left

  bool operator==(const ControlInput&) const = default;

  /// Clamps every channel into range; NaN maps to 0.
  static ControlInput clamped(double throttle, double brake, double steer);
  bool in_range() const;
};

/// Traction multiplier of the drive layout: single-axle 0.6, all-wheel 1.0.
double traction_factor(DriveMode mode);

/// Drive force before friction scaling.
/// electric: throttle * max_drive_force.
/// ice: max_drive_force * (idle + (1 - idle) * throttle) * max(0, 1 - v / v_top),
///      v_top = sqrt(max_drive_force / drag_coeff).
/// Both are scaled by `traction_factor`.
double powertrain_force(const VehicleParams& params, double throttle, double speed);

/// One fixed step of the longitudinal force balance plus the kinematic
/// bicycle, with the position advanced along the midpoint heading.
VehicleState step_vehicle(const VehicleState& state, const VehicleParams& params, const ControlInput& input,
                          double friction_scale, double dt);

/// Deceleration available from full braking, m/s^2.
double brake_capability(const VehicleParams& params, double friction_scale);

/// Front bumper center.
geo::Vec2 front_bumper(const VehicleState& state, const VehicleParams& params);

geo::Polygon footprint(const VehicleState& state, const VehicleParams& params);

}  // namespace drivesim::dyn

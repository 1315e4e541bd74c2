#include "drivesim/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace drivesim::dyn {

namespace {
double clamp_or_zero(double v, double lo, double hi) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, lo, hi);
}
}  // namespace

ControlInput ControlInput::clamped(double throttle, double brake, double steer) {
  return {clamp_or_zero(throttle, 0.0, 1.0), clamp_or_zero(brake, 0.0, 1.0), clamp_or_zero(steer, -1.0, 1.0)};
}

bool ControlInput::in_range() const {
  return throttle >= 0.0 && throttle <= 1.0 && brake >= 0.0 && brake <= 1.0 && steer >= -1.0 && steer <= 1.0;
}

double traction_factor(DriveMode mode) { return mode == DriveMode::all ? 1.0 : 0.6; }

double powertrain_force(const VehicleParams& params, double throttle, double speed) {
  double force = 0.0;
  switch (params.powertrain) {
    case Powertrain::electric:
      force = throttle * params.max_drive_force;
      break;
    case Powertrain::ice: {
      const double v_top = std::sqrt(params.max_drive_force / params.drag_coeff);
      const double taper = std::max(0.0, 1.0 - speed / v_top);
      force = params.max_drive_force *
              (params.ice_idle_fraction + (1.0 - params.ice_idle_fraction) * throttle) * taper;
      break;
    }
  }
  return force * traction_factor(params.drive_mode);
}

VehicleState step_vehicle(const VehicleState& state, const VehicleParams& params, const ControlInput& input,
                          double friction_scale, double dt) {
  const double v = state.speed;
  const double drive = powertrain_force(params, input.throttle, v) * friction_scale;
  // v >= 0 always; the brake opposes forward motion and holds the car at rest.
  const double brake = input.brake * params.max_brake_force * friction_scale;
  const double resist = params.drag_coeff * v * v + params.rolling_coeff * v;
  const double accel = (drive - brake - resist) / params.mass;
  const double v_next = std::max(0.0, v + accel * dt);

  const double delta = input.steer * params.max_steer;
  const double curvature = std::tan(delta) / params.wheelbase;
  const double yaw_rate = v_next * curvature;
  const double dheading = yaw_rate * dt;
  const double mid = state.pose.heading + 0.5 * dheading;
  const double step = v_next * dt;

  VehicleState next;
  next.pose.position = {state.pose.position.x + step * std::cos(mid), state.pose.position.y + step * std::sin(mid)};
  next.pose.heading = geo::normalize_angle(state.pose.heading + dheading);
  next.speed = v_next;
  next.yaw_rate = yaw_rate;
  next.accel_long = (v_next - v) / dt;
  next.accel_lat = v_next * v_next * curvature;
  return next;
}

double brake_capability(const VehicleParams& params, double friction_scale) {
  return params.max_brake_force * friction_scale / params.mass;
}

geo::Vec2 front_bumper(const VehicleState& state, const VehicleParams& params) {
  return geo::to_world(state.pose, {0.5 * params.length, 0.0});
}

geo::Polygon footprint(const VehicleState& state, const VehicleParams& params) {
  return geo::oriented_rect(state.pose, params.length, params.width);
}

}  // namespace drivesim::dyn

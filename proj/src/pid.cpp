#include "drivesim/pid.hpp"

#include <algorithm>

namespace drivesim::dyn {

double PidController::step_error(double error, double dt) {
  const double limit = gains_.integral_limit;
  const double integral = std::clamp(integral_ + error * dt, -limit, limit);
  const double derivative = has_prev_ ? (error - prev_error_) / dt : 0.0;

  double raw = gains_.kp * error + gains_.ki * integral + gains_.kd * derivative;
  if (gains_.freeze_integral_on_saturation &&
      ((raw > gains_.output_max && error > 0.0) || (raw < gains_.output_min && error < 0.0))) {
    raw = gains_.kp * error + gains_.ki * integral_ + gains_.kd * derivative;
  } else {
    integral_ = integral;
  }
  prev_error_ = error;
  has_prev_ = true;
  return std::clamp(raw, gains_.output_min, gains_.output_max);
}

ControlInput speed_tracking_input(PidController& speed_pid, PidController& steer_pid, double target_speed,
                                  double target_heading, const VehicleState& state, double dt) {
  const double u = speed_pid.step(target_speed, state.speed, dt);
  const double heading_error = geo::normalize_angle(target_heading - state.pose.heading);
  const double steer = steer_pid.step_error(heading_error, dt);
  return ControlInput::clamped(std::max(0.0, u), std::max(0.0, -u), steer);
}

}  // namespace drivesim::dyn

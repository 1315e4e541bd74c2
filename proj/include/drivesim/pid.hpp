#pragma once

#include "drivesim/dynamics.hpp"

namespace drivesim::dyn {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double integral_limit = 0.0;
  double output_min = -1.0;
  double output_max = 1.0;
  /// Hold the integral while the raw output is saturated in the direction
  /// the error pushes it (conditional integration).
  bool freeze_integral_on_saturation = true;

  bool operator==(const PidGains&) const = default;

  static PidGains default_speed() { return {0.30, 0.05, 0.0, 10.0, -1.0, 1.0, true}; }
  static PidGains default_steer() { return {1.2, 0.0, 0.1, 0.0, -1.0, 1.0, true}; }
};

class PidController {
 public:
  PidController() = default;
  explicit PidController(const PidGains& gains) : gains_(gains) {}

  /// e = setpoint - measurement. The derivative term is zero on the first
  /// call after construction or reset.
  double step(double setpoint, double measurement, double dt) { return step_error(setpoint - measurement, dt); }
  double step_error(double error, double dt);

  void reset() {
    integral_ = 0.0;
    prev_error_ = 0.0;
    has_prev_ = false;
  }

  const PidGains& gains() const { return gains_; }
  double integral() const { return integral_; }
  double prev_error() const { return prev_error_; }

  bool operator==(const PidController&) const = default;

 private:
  PidGains gains_;
  double integral_ = 0.0;
  double prev_error_ = 0.0;
  bool has_prev_ = false;
};

/// Speed PID drives throttle/brake (positive output throttles, negative
/// brakes); steer PID acts on the heading error wrapped into (-pi, pi].
ControlInput speed_tracking_input(PidController& speed_pid, PidController& steer_pid, double target_speed,
                                  double target_heading, const VehicleState& state, double dt);

}  // namespace drivesim::dyn

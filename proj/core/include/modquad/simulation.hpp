#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "modquad/actuation.hpp"
#include "modquad/control.hpp"
#include "modquad/state.hpp"
#include "modquad/trajectories.hpp"
#include "modquad/vehicle.hpp"

namespace modquad {

struct MotorModel {
  double f_max = 0.645;       // N
  double time_constant = 0.0; // s, 0 disables the first-order lag
  double deadzone = 0.0;      // N, commands below this produce no thrust
  bool operator==(const MotorModel&) const = default;
};

/// Throws InvalidParams unless f_max > 0 and the lag and deadzone are >= 0.
void validate(const MotorModel& model);

struct MotorOutput {
  Eigen::VectorXd thrust;  // always inside [0, f_max]
  int saturated = 0;       // commands clamped at 0 or f_max
};

/// Clamps to [0, f_max], applies the deadzone, then moves the previous output
/// toward the target with factor 1 - exp(-dt / tau). An empty previous output
/// means the motors start at the target.
MotorOutput motor_apply(const Eigen::VectorXd& u_cmd, const MotorModel& model, double dt,
                        const Eigen::VectorXd& previous = {});

struct Accelerations {
  Vec3 linear = Vec3::Zero();   // world
  Vec3 angular = Vec3::Zero();  // body
};

/// r'' = R w_f / m - g e3, omega' = J^-1 (w_tau - omega x J omega), w = A u.
Accelerations dynamics_derivative(const VehicleState& state, const Eigen::VectorXd& u,
                                  const StructureModel& structure, double gravity = kGravity);

/// Largest allowed integration step, s.
inline constexpr double kMaxStep = 0.01;

/// Fourth-order Runge-Kutta-Munthe-Kaas step with thrust held constant.
/// Throws InvalidParams unless 0 < dt <= kMaxStep.
VehicleState step(const VehicleState& state, const Eigen::VectorXd& u,
                  const StructureModel& structure, double dt, double gravity = kGravity);

struct TelemetrySample {
  double t = 0.0;
  VehicleState state;
  Vec3 position_d = Vec3::Zero();
  Mat3 attitude_d = Mat3::Identity();  // ^W R_F desired used by the controller
  Eigen::VectorXd u_cmd;
  Eigen::VectorXd u_actual;
  int saturated = 0;
};

struct Telemetry {
  int dof = 0;
  Mat3 f_frame = Mat3::Identity();
  double f_max = 0.0;
  int rotors = 0;
  std::vector<TelemetrySample> samples;
  bool diverged = false;
  std::string failure;

  /// Throws NonFiniteState when the run aborted.
  void throw_if_diverged() const;
};

struct ScenarioOptions {
  double duration = 10.0;
  double dt_ctrl = 0.002;
  double dt_sim = 0.001;
  MotorModel motor;
  double gravity = kGravity;
  /// Defaults to resting on the trajectory start with the F-frame at the
  /// desired attitude.
  std::optional<VehicleState> initial_state;
};

/// Throws InvalidParams when dt_ctrl is not an integer multiple of dt_sim or
/// a duration or step is out of range.
void validate(const ScenarioOptions& options);

/// Divergence limit on ||r||, m.
inline constexpr double kDivergenceRadius = 100.0;

/// Closed loop at the control rate: sample trajectory, control, hold motor
/// command over the sub-steps, integrate. One sample per control tick,
/// including t = 0. Divergence stops the run and sets Telemetry::diverged.
Telemetry run_scenario(const StructureModel& structure, const ActuationAnalysis& analysis,
                       const ControllerGains& gains, const Trajectory& trajectory,
                       const ScenarioOptions& options);

}  // namespace modquad

#pragma once

#include <variant>

#include <Eigen/Core>

#include "modquad/actuation.hpp"
#include "modquad/geometry.hpp"
#include "modquad/state.hpp"
#include "modquad/vehicle.hpp"

namespace modquad {

/// Diagonal gains, stored as their diagonals.
struct ControllerGains {
  Vec3 k_r{6.0, 6.0, 6.0};
  Vec3 k_v{4.0, 4.0, 4.0};
  Vec3 k_R{100.0, 100.0, 100.0};
  Vec3 k_omega{20.0, 20.0, 20.0};
  Vec3 k_i = Vec3::Zero();      // optional integral on position error
  double integral_limit = 2.0;  // per-axis clamp of the integral state, m*s

  bool operator==(const ControllerGains&) const = default;
};

/// Throws InvalidParams unless K_r, K_v, K_R, K_omega > 0 and K_i >= 0.
void validate(const ControllerGains& gains);

struct YawTarget {
  double yaw = 0.0;
};
struct YawPitchTarget {
  double yaw = 0.0;
  double pitch = 0.0;
};
struct AttitudeTarget {
  Mat3 rotation = Mat3::Identity();  // ^W R_F desired
};

using AttitudeMode = std::variant<YawTarget, YawPitchTarget, AttitudeTarget>;

struct Setpoint {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  AttitudeMode mode = YawTarget{};
  Vec3 angular_velocity = Vec3::Zero();  // desired frame, rad/s

  /// 4, 5 or 6 according to the attitude mode.
  int dof() const { return static_cast<int>(mode.index()) + 4; }
};

struct Wrench {
  Vec3 force = Vec3::Zero();   // {F}, N
  Vec3 torque = Vec3::Zero();  // {F}, N*m

  Wrench6 stacked() const {
    Wrench6 w;
    w << force, torque;
    return w;
  }
};

/// Threshold for DegenerateThrust and GimbalDegenerate.
inline constexpr double kDegeneracyEps = 1e-6;

/// a_r = K_r e_r + K_v e_v + g e3 + rdd_d (+ K_i * integral).
Vec3 position_accel(const Vec3& e_r, const Vec3& e_v, const Vec3& accel_d,
                    const ControllerGains& gains, const Vec3& integral = Vec3::Zero(),
                    double gravity = kGravity);

/// z along a_r, x as close as possible to the heading (cos yaw, sin yaw, 0).
Mat3 desired_attitude_4dof(const Vec3& a_r, double yaw);

/// x = Rz(yaw) Ry(pitch) e1 exactly; z is x cross (a_r x x), normalised.
Mat3 desired_attitude_5dof(const Vec3& a_r, double yaw, double pitch);

struct AttitudeError {
  Vec3 e_R = Vec3::Zero();
  Vec3 e_omega = Vec3::Zero();
};

/// Error of the F-frame attitude ^W R_S ^S R_F against desired. omega is the
/// body rate expressed in {F}; omega_d is expressed in the desired frame.
AttitudeError attitude_error(const Mat3& r_desired, const Mat3& r_ws, const Mat3& r_sf,
                             const Vec3& omega, const Vec3& omega_d);

/// a_R = -K_R e_R - K_omega e_omega
Vec3 attitude_accel(const AttitudeError& error, const ControllerGains& gains);

/// force = m R^T a_r, torque = J a_R + omega x J omega, all in {F}.
Wrench wrench(const Vec3& a_r, const Vec3& a_R, const Mat3& r_wf, const Vec3& omega,
              double mass, const Mat3& inertia);

struct ControlOutput {
  Eigen::VectorXd thrust;               // raw command, may leave [0, f_max]
  Wrench wrench;                        // {F}
  Mat3 r_desired = Mat3::Identity();    // ^W R_F desired
  Vec3 a_r = Vec3::Zero();
};

/// One pass of the controller. Throws ModeMismatch when the setpoint mode does
/// not match the structure's controllable DOF.
ControlOutput control_step(const VehicleState& state, const Setpoint& setpoint,
                           const StructureModel& structure, const ActuationAnalysis& analysis,
                           const ControllerGains& gains, const Vec3& integral = Vec3::Zero(),
                           double gravity = kGravity);

/// Stateful controller: caches the allocator and F-frame quantities and keeps
/// the clamped position-error integral.
class GeometricController {
 public:
  GeometricController(const StructureModel& structure, const ActuationAnalysis& analysis,
                      const ControllerGains& gains, double gravity = kGravity);

  /// dt advances the integral; pass 0 to evaluate without accumulating.
  ControlOutput update(const VehicleState& state, const Setpoint& setpoint, double dt);

  /// Stateless evaluation with an explicit integral value.
  ControlOutput evaluate(const VehicleState& state, const Setpoint& setpoint,
                         const Vec3& integral) const;

  void reset() { integral_.setZero(); }
  const Vec3& integral() const { return integral_; }
  int dof() const { return dof_; }

 private:
  ControllerGains gains_;
  double gravity_;
  double mass_;
  int dof_;
  Mat3 r_sf_;
  Mat3 inertia_f_;
  Allocator allocator_;
  Vec3 integral_ = Vec3::Zero();
};

}  // namespace modquad

#include "modquad/control.hpp"

#include <sstream>

#include "modquad/error.hpp"

namespace modquad {

void validate(const ControllerGains& g) {
  const bool ok = (g.k_r.array() > 0.0).all() && (g.k_v.array() > 0.0).all() &&
                  (g.k_R.array() > 0.0).all() && (g.k_omega.array() > 0.0).all() &&
                  (g.k_i.array() >= 0.0).all() && g.integral_limit >= 0.0 &&
                  g.k_r.allFinite() && g.k_v.allFinite() && g.k_R.allFinite() &&
                  g.k_omega.allFinite() && g.k_i.allFinite();
  if (!ok) throw Error(ErrorCode::kInvalidParams, "controller gains must be positive and finite");
}

Vec3 position_accel(const Vec3& e_r, const Vec3& e_v, const Vec3& accel_d,
                    const ControllerGains& gains, const Vec3& integral, double gravity) {
  return gains.k_r.cwiseProduct(e_r) + gains.k_v.cwiseProduct(e_v) +
         gains.k_i.cwiseProduct(integral) + gravity * Vec3::UnitZ() + accel_d;
}

namespace {

Vec3 thrust_direction(const Vec3& a_r) {
  const double n = a_r.norm();
  if (!(n > kDegeneracyEps)) {
    std::ostringstream msg;
    msg << "||a_r|| = " << n;
    throw Error(ErrorCode::kDegenerateThrust, msg.str());
  }
  return a_r / n;
}

Vec3 checked_unit_cross(const Vec3& a, const Vec3& b) {
  const Vec3 c = a.cross(b);
  const double n = c.norm();
  if (!(n > kDegeneracyEps)) {
    throw Error(ErrorCode::kGimbalDegenerate, "thrust direction parallel to the heading axis");
  }
  return c / n;
}

Mat3 from_columns(const Vec3& x, const Vec3& y, const Vec3& z) {
  Mat3 r;
  r << x, y, z;
  return r;
}

}  // namespace

Mat3 desired_attitude_4dof(const Vec3& a_r, double yaw) {
  const Vec3 z = thrust_direction(a_r);
  const Vec3 x_c(std::cos(yaw), std::sin(yaw), 0.0);
  const Vec3 y = checked_unit_cross(z, x_c);
  return from_columns(y.cross(z), y, z);
}

Mat3 desired_attitude_5dof(const Vec3& a_r, double yaw, double pitch) {
  const Vec3 z_c = thrust_direction(a_r);
  const Vec3 x = rot_principal(Axis::kZ, yaw) * rot_principal(Axis::kY, pitch) * Vec3::UnitX();
  const Vec3 y = checked_unit_cross(z_c, x);
  return from_columns(x, y, x.cross(y));
}

AttitudeError attitude_error(const Mat3& r_desired, const Mat3& r_ws, const Mat3& r_sf,
                             const Vec3& omega, const Vec3& omega_d) {
  const Mat3 r = r_ws * r_sf;
  const Mat3 skew = r_desired.transpose() * r - r.transpose() * r_desired;
  AttitudeError e;
  e.e_R = 0.5 * Vec3(skew(2, 1), skew(0, 2), skew(1, 0));
  e.e_omega = omega - r.transpose() * r_desired * omega_d;
  return e;
}

Vec3 attitude_accel(const AttitudeError& error, const ControllerGains& gains) {
  return -gains.k_R.cwiseProduct(error.e_R) - gains.k_omega.cwiseProduct(error.e_omega);
}

Wrench wrench(const Vec3& a_r, const Vec3& a_R, const Mat3& r_wf, const Vec3& omega,
              double mass, const Mat3& inertia) {
  Wrench w;
  w.force = mass * r_wf.transpose() * a_r;
  w.torque = inertia * a_R + omega.cross(inertia * omega);
  return w;
}

GeometricController::GeometricController(const StructureModel& structure,
                                         const ActuationAnalysis& analysis,
                                         const ControllerGains& gains, double gravity)
    : gains_(gains),
      gravity_(gravity),
      mass_(structure.mass),
      dof_(analysis.controllable_dof),
      r_sf_(analysis.f_frame),
      inertia_f_(analysis.f_frame.transpose() * structure.inertia * analysis.f_frame),
      allocator_(to_f_frame(structure.design, analysis.f_frame), dimensioning_matrix(dof_)) {
  validate(gains_);
}

ControlOutput GeometricController::evaluate(const VehicleState& state, const Setpoint& setpoint,
                                            const Vec3& integral) const {
  if (setpoint.dof() != dof_) {
    std::ostringstream msg;
    msg << "structure has " << dof_ << " controllable DOF but the setpoint is " << setpoint.dof()
        << "-DOF";
    throw Error(ErrorCode::kModeMismatch, msg.str());
  }
  ControlOutput out;
  const Vec3 e_r = setpoint.position - state.position;
  const Vec3 e_v = setpoint.velocity - state.velocity;
  out.a_r = position_accel(e_r, e_v, setpoint.acceleration, gains_, integral, gravity_);

  if (const auto* m = std::get_if<YawTarget>(&setpoint.mode)) {
    out.r_desired = desired_attitude_4dof(out.a_r, m->yaw);
  } else if (const auto* m5 = std::get_if<YawPitchTarget>(&setpoint.mode)) {
    out.r_desired = desired_attitude_5dof(out.a_r, m5->yaw, m5->pitch);
  } else {
    out.r_desired = std::get<AttitudeTarget>(setpoint.mode).rotation;
  }

  const Vec3 omega_f = r_sf_.transpose() * state.angular_velocity;
  const AttitudeError err =
      attitude_error(out.r_desired, state.attitude, r_sf_, omega_f, setpoint.angular_velocity);
  const Vec3 a_R = attitude_accel(err, gains_);
  out.wrench = wrench(out.a_r, a_R, state.attitude * r_sf_, omega_f, mass_, inertia_f_);
  out.thrust = allocator_(out.wrench.stacked());
  return out;
}

ControlOutput GeometricController::update(const VehicleState& state, const Setpoint& setpoint,
                                          double dt) {
  ControlOutput out = evaluate(state, setpoint, integral_);
  if (dt > 0.0 && (gains_.k_i.array() > 0.0).any()) {
    const Vec3 lim = Vec3::Constant(gains_.integral_limit);
    integral_ = (integral_ + dt * (setpoint.position - state.position)).cwiseMax(-lim).cwiseMin(lim);
  }
  return out;
}

ControlOutput control_step(const VehicleState& state, const Setpoint& setpoint,
                           const StructureModel& structure, const ActuationAnalysis& analysis,
                           const ControllerGains& gains, const Vec3& integral, double gravity) {
  if (setpoint.dof() != analysis.controllable_dof) {
    std::ostringstream msg;
    msg << "structure has " << analysis.controllable_dof
        << " controllable DOF but the setpoint is " << setpoint.dof() << "-DOF";
    throw Error(ErrorCode::kModeMismatch, msg.str());
  }
  return GeometricController(structure, analysis, gains, gravity)
      .evaluate(state, setpoint, integral);
}

}  // namespace modquad

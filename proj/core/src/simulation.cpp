#include "modquad/simulation.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "modquad/error.hpp"

namespace modquad {

void validate(const MotorModel& m) {
  if (!(m.f_max > 0.0) || !std::isfinite(m.f_max) || !(m.time_constant >= 0.0) ||
      !(m.deadzone >= 0.0)) {
    throw Error(ErrorCode::kInvalidParams, "motor model needs f_max > 0, lag >= 0, deadzone >= 0");
  }
}

MotorOutput motor_apply(const Eigen::VectorXd& u_cmd, const MotorModel& model, double dt,
                        const Eigen::VectorXd& previous) {
  MotorOutput out;
  out.thrust.resize(u_cmd.size());
  for (Eigen::Index i = 0; i < u_cmd.size(); ++i) {
    double u = u_cmd(i);
    if (!(u >= 0.0)) {
      u = 0.0;
      ++out.saturated;
    } else if (u > model.f_max) {
      u = model.f_max;
      ++out.saturated;
    }
    if (u < model.deadzone) u = 0.0;
    out.thrust(i) = u;
  }
  if (model.time_constant > 0.0 && previous.size() == u_cmd.size() && dt > 0.0) {
    const double alpha = 1.0 - std::exp(-dt / model.time_constant);
    out.thrust = previous + alpha * (out.thrust - previous);
  }
  return out;
}

namespace {

struct Plant {
  double mass;
  Mat3 inertia;
  Mat3 inertia_inv;
  Vec3 force;   // body
  Vec3 torque;  // body
  double gravity;

  Vec3 linear(const Mat3& r) const { return r * force / mass - gravity * Vec3::UnitZ(); }
  Vec3 angular(const Vec3& w) const { return inertia_inv * (torque - w.cross(inertia * w)); }
};

Plant make_plant(const Eigen::VectorXd& u, const StructureModel& s, double gravity) {
  const Wrench6 w = s.design * u;
  return Plant{s.mass, s.inertia, s.inertia.inverse(), w.head<3>(), w.tail<3>(), gravity};
}

// Inverse of the right-trivialised dexp, truncated after the second-order term.
Vec3 dexp_inv(const Vec3& xi, const Vec3& w) {
  const Vec3 c = xi.cross(w);
  return w + 0.5 * c + xi.cross(c) / 12.0;
}

}  // namespace

Accelerations dynamics_derivative(const VehicleState& state, const Eigen::VectorXd& u,
                                  const StructureModel& structure, double gravity) {
  const Plant p = make_plant(u, structure, gravity);
  return Accelerations{p.linear(state.attitude), p.angular(state.angular_velocity)};
}

VehicleState step(const VehicleState& s, const Eigen::VectorXd& u,
                  const StructureModel& structure, double dt, double gravity) {
  if (!(dt > 0.0 && dt <= kMaxStep)) {
    std::ostringstream msg;
    msg << "integration step " << dt << " s outside (0, " << kMaxStep << "]";
    throw Error(ErrorCode::kInvalidParams, msg.str());
  }
  const Plant p = make_plant(u, structure, gravity);
  const Mat3& r0 = s.attitude;

  // Stage 1
  const Vec3 v1 = s.velocity;
  const Vec3 a1 = p.linear(r0);
  const Vec3 w1 = s.angular_velocity;
  const Vec3 al1 = p.angular(w1);
  const Vec3 k1 = w1;
  // Stage 2
  const Vec3 xi2 = 0.5 * dt * k1;
  const Vec3 v2 = s.velocity + 0.5 * dt * a1;
  const Vec3 a2 = p.linear(r0 * so3_exp(xi2, 1.0));
  const Vec3 w2 = s.angular_velocity + 0.5 * dt * al1;
  const Vec3 al2 = p.angular(w2);
  const Vec3 k2 = dexp_inv(xi2, w2);
  // Stage 3
  const Vec3 xi3 = 0.5 * dt * k2;
  const Vec3 v3 = s.velocity + 0.5 * dt * a2;
  const Vec3 a3 = p.linear(r0 * so3_exp(xi3, 1.0));
  const Vec3 w3 = s.angular_velocity + 0.5 * dt * al2;
  const Vec3 al3 = p.angular(w3);
  const Vec3 k3 = dexp_inv(xi3, w3);
  // Stage 4
  const Vec3 xi4 = dt * k3;
  const Vec3 v4 = s.velocity + dt * a3;
  const Vec3 a4 = p.linear(r0 * so3_exp(xi4, 1.0));
  const Vec3 w4 = s.angular_velocity + dt * al3;
  const Vec3 al4 = p.angular(w4);
  const Vec3 k4 = dexp_inv(xi4, w4);

  VehicleState out;
  out.position = s.position + dt / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4);
  out.velocity = s.velocity + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  out.angular_velocity = s.angular_velocity + dt / 6.0 * (al1 + 2.0 * al2 + 2.0 * al3 + al4);
  out.attitude = r0 * so3_exp(dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), 1.0);
  if (orthonormality_error(out.attitude) > 1e-9) out.attitude = project_to_so3(out.attitude);
  return out;
}

void Telemetry::throw_if_diverged() const {
  if (diverged) throw Error(ErrorCode::kNonFiniteState, failure);
}

void validate(const ScenarioOptions& o) {
  validate(o.motor);
  if (!(o.duration >= 0.0) || !std::isfinite(o.duration)) {
    throw Error(ErrorCode::kInvalidParams, "scenario duration must be >= 0");
  }
  if (!(o.dt_sim > 0.0 && o.dt_sim <= kMaxStep) || !(o.dt_ctrl > 0.0)) {
    throw Error(ErrorCode::kInvalidParams, "dt_sim must lie in (0, 0.01] s and dt_ctrl be > 0");
  }
  const double ratio = o.dt_ctrl / o.dt_sim;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
    std::ostringstream msg;
    msg << "dt_ctrl " << o.dt_ctrl << " is not an integer multiple of dt_sim " << o.dt_sim;
    throw Error(ErrorCode::kInvalidParams, msg.str());
  }
}

namespace {

VehicleState default_initial_state(const Trajectory& trajectory, const GeometricController& ctl,
                                   const Mat3& r_sf, double gravity) {
  const Setpoint sp = trajectory.setpoint(0.0, ctl.dof(), kAttitudeRateStep, gravity);
  VehicleState s;
  s.position = sp.position;
  s.velocity = sp.velocity;
  // With zero tracking error the controller's desired attitude is a function
  // of the setpoint alone; evaluate it at the setpoint to seat the vehicle.
  VehicleState probe = s;
  const ControlOutput out = ctl.evaluate(probe, sp, Vec3::Zero());
  s.attitude = out.r_desired * r_sf.transpose();
  s.angular_velocity = r_sf * sp.angular_velocity;
  return s;
}

bool within_bounds(const VehicleState& s) {
  return s.finite() && s.position.norm() <= kDivergenceRadius;
}

}  // namespace

Telemetry run_scenario(const StructureModel& structure, const ActuationAnalysis& analysis,
                       const ControllerGains& gains, const Trajectory& trajectory,
                       const ScenarioOptions& options) {
  validate(options);
  GeometricController controller(structure, analysis, gains, options.gravity);
  const Mat3& r_sf = analysis.f_frame;

  Telemetry tel;
  tel.dof = analysis.controllable_dof;
  tel.f_frame = r_sf;
  tel.f_max = options.motor.f_max;
  tel.rotors = static_cast<int>(structure.design.cols());

  VehicleState state = options.initial_state
                           ? *options.initial_state
                           : default_initial_state(trajectory, controller, r_sf, options.gravity);
  const long ticks = std::lround(options.duration / options.dt_ctrl);
  const int substeps = static_cast<int>(std::lround(options.dt_ctrl / options.dt_sim));
  tel.samples.reserve(static_cast<std::size_t>(ticks) + 1);

  Eigen::VectorXd motors;
  for (long k = 0; k <= ticks; ++k) {
    const double t = static_cast<double>(k) * options.dt_ctrl;
    TelemetrySample sample;
    sample.t = t;
    sample.state = state;
    if (!within_bounds(state)) {
      tel.diverged = true;
      std::ostringstream msg;
      msg << "state left the admissible region at t = " << t << " s";
      tel.failure = msg.str();
      break;
    }
    const Setpoint sp = trajectory.setpoint(t, controller.dof(), kAttitudeRateStep, options.gravity);
    ControlOutput out;
    try {
      out = controller.update(state, sp, options.dt_ctrl);
    } catch (const Error& e) {
      tel.diverged = true;
      tel.failure = e.what();
      break;
    }
    sample.position_d = sp.position;
    sample.attitude_d = out.r_desired;
    sample.u_cmd = out.thrust;
    if (!out.thrust.allFinite()) {
      tel.diverged = true;
      tel.failure = "controller produced a non-finite thrust command";
      break;
    }

    MotorOutput m = motor_apply(out.thrust, options.motor, options.dt_sim, motors);
    sample.u_actual = m.thrust;
    sample.saturated = m.saturated;
    tel.samples.push_back(sample);
    if (k == ticks) break;

    for (int i = 0; i < substeps; ++i) {
      if (i > 0) m = motor_apply(out.thrust, options.motor, options.dt_sim, motors);
      motors = m.thrust;
      state = step(state, motors, structure, options.dt_sim, options.gravity);
    }
  }
  return tel;
}

}  // namespace modquad

#include <gtest/gtest.h>

#include "modquad/config.hpp"
#include "modquad/error.hpp"
#include "modquad/simulation.hpp"
#include "oracles.hpp"

namespace modquad {
namespace {

using namespace modquad::testing;

constexpr double kG = 9.81;

TEST(MotorApply, Clamping) {
  const MotorModel m;
  Eigen::VectorXd u(3);
  u << -0.1, 2 * m.f_max, 0.3;
  const MotorOutput out = motor_apply(u, m, 0.001);
  EXPECT_EQ(out.thrust(0), 0.0);
  EXPECT_EQ(out.thrust(1), m.f_max);
  EXPECT_EQ(out.thrust(2), 0.3);
  EXPECT_EQ(out.saturated, 2);
}

TEST(MotorApply, DeadzoneAndLag) {
  MotorModel m;
  m.deadzone = 0.05;
  Eigen::VectorXd u(2);
  u << 0.04, 0.2;
  const MotorOutput dz = motor_apply(u, m, 0.001);
  EXPECT_EQ(dz.thrust(0), 0.0);
  EXPECT_EQ(dz.thrust(1), 0.2);

  m.deadzone = 0.0;
  m.time_constant = 0.02;
  const Eigen::VectorXd prev = Eigen::VectorXd::Zero(2);
  const MotorOutput lag = motor_apply(u, m, 0.01, prev);
  const double alpha = 1 - std::exp(-0.5);
  EXPECT_NEAR(lag.thrust(1), alpha * 0.2, 1e-15);
  EXPECT_EQ(motor_apply(u, m, 0.01).thrust(1), 0.2);
}

TEST(MotorModel, Validation) {
  MotorModel m;
  m.f_max = 0.0;
  EXPECT_THROW(validate(m), Error);
  m = MotorModel{};
  m.time_constant = -1.0;
  EXPECT_THROW(validate(m), Error);
}

TEST(Dynamics, FreeFallAndHover) {
  const StructureModel s = four_t_structure();
  const auto a0 = dynamics_derivative(VehicleState{}, Eigen::VectorXd::Zero(16), s);
  EXPECT_TRUE(a0.linear.isApprox(Vec3(0, 0, -kG)));
  EXPECT_TRUE(a0.angular.isZero(0.0));

  const Eigen::VectorXd hover =
      Eigen::VectorXd::Constant(16, s.mass * kG / (16 * std::cos(kPi / 4)));
  const auto ah = dynamics_derivative(VehicleState{}, hover, s);
  EXPECT_LT(ah.linear.norm(), 1e-12);
  EXPECT_LT(ah.angular.norm(), 1e-9);
}

TEST(Dynamics, PureYawTorque) {
  const StructureModel s = single_module(make_r_module(Mat3::Identity()));
  Eigen::VectorXd u(4);
  u << 0.2, 0.0, 0.2, 0.0;
  const Vec3 tau = (s.design * u).tail<3>();
  EXPECT_TRUE(tau.isApprox(Vec3(0, 0, 0.4 * ModuleParams{}.drag_ratio()), 1e-12));
  const auto a = dynamics_derivative(VehicleState{}, u, s, 0.0);
  EXPECT_TRUE(a.angular.isApprox(Vec3(0, 0, tau.z() / s.inertia(2, 2)), 1e-12));
}

TEST(Step, RejectsBadDt) {
  const StructureModel s = vertical_2x2();
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(16);
  EXPECT_THROW(step(VehicleState{}, u, s, 0.0), Error);
  EXPECT_THROW(step(VehicleState{}, u, s, 0.011), Error);
  EXPECT_NO_THROW(step(VehicleState{}, u, s, 0.01));
}

TEST(Step, FreeFall) {
  const StructureModel s = vertical_2x2();
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(16);
  VehicleState x;
  for (int i = 0; i < 1000; ++i) x = step(x, u, s, 0.001);
  EXPECT_NEAR(x.position.z(), -0.5 * kG, 1e-6);
  EXPECT_NEAR(x.velocity.z(), -kG, 1e-9);
  EXPECT_EQ(x.attitude, Mat3::Identity());
}

TEST(Step, HoverEquilibrium) {
  const StructureModel s = four_t_structure();
  const Eigen::VectorXd hover =
      Eigen::VectorXd::Constant(16, s.mass * kG / (16 * std::cos(kPi / 4)));
  VehicleState x;
  x.position = Vec3(0, 0, 1);
  for (int i = 0; i < 100; ++i) {
    const VehicleState next = step(x, hover, s, 0.001);
    EXPECT_LT((next.position - x.position).norm(), 1e-9);
    EXPECT_LT((next.attitude - x.attitude).norm(), 1e-9);
    x = next;
  }
}

TEST(Step, PrincipalAxisSpinUp) {
  const StructureModel s = single_module(make_r_module(Mat3::Identity()));
  Eigen::VectorXd u(4);
  u << 0.2, 0.0, 0.2, 0.0;
  const double tau = (s.design * u).tail<3>().z();
  VehicleState x;
  for (int i = 0; i < 1000; ++i) x = step(x, u, s, 0.001, 0.0);
  EXPECT_NEAR(x.angular_velocity.z(), tau / s.inertia(2, 2) * 1.0, 1e-6);
  EXPECT_NEAR(x.angular_velocity.head<2>().norm(), 0.0, 1e-9);
  const double angle = 0.5 * tau / s.inertia(2, 2);
  EXPECT_LT((x.attitude - rz(angle)).norm(), 1e-6);
}

TEST(StepProperty, So3DriftOver1e5Steps) {
  const StructureModel s = four_t_structure();
  VehicleState x;
  x.angular_velocity = Vec3(1.3, -0.7, 2.1);
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(16);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    x = step(x, u, s, 0.001, 0.0);
    worst = std::max(worst, orthonormality_error(x.attitude));
  }
  EXPECT_LT(worst, 1e-9);
  EXPECT_NEAR(x.attitude.determinant(), 1.0, 1e-9);
}

TEST(StepProperty, TorqueFreeMomentum) {
  const StructureModel s = four_t_structure();
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(16);
  VehicleState x;
  x.angular_velocity = Vec3(0, 0, 3.0);
  const double h0 = (s.inertia * x.angular_velocity).norm();
  for (int i = 0; i < 10000; ++i) x = step(x, u, s, 0.001, 0.0);
  EXPECT_NEAR((s.inertia * x.angular_velocity).norm() / h0, 1.0, 1e-6);

  VehicleState y;
  y.angular_velocity = Vec3(0.4, -1.1, 0.8);
  const Vec3 l0 = y.attitude * s.inertia * y.angular_velocity;
  for (int i = 0; i < 10000; ++i) y = step(y, u, s, 0.001, 0.0);
  const Vec3 l1 = y.attitude * s.inertia * y.angular_velocity;
  EXPECT_LT((l1 - l0).norm() / l0.norm(), 1e-6);
}

TEST(StepProperty, LinearMomentumWithoutGravity) {
  const StructureModel s = vertical_2x2();
  VehicleState x;
  x.velocity = Vec3(0.3, -0.2, 0.1);
  x.angular_velocity = Vec3(0.2, 0.1, -0.4);
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(16);
  for (int i = 0; i < 5000; ++i) x = step(x, u, s, 0.002, 0.0);
  EXPECT_EQ(x.velocity, Vec3(0.3, -0.2, 0.1));
}

TEST(Scenario, ZeroDuration) {
  const StructureModel s = four_t_structure();
  const auto a = analyze_structure(s, 0.645);
  ScenarioOptions o;
  o.duration = 0.0;
  const Telemetry t = run_scenario(s, a, ControllerGains{}, Trajectory{HoverParams{}}, o);
  EXPECT_EQ(t.samples.size(), 1u);
  EXPECT_FALSE(t.diverged);
  EXPECT_EQ(t.dof, 6);
}

TEST(Scenario, OptionsValidation) {
  ScenarioOptions o;
  o.dt_ctrl = 0.0025;
  EXPECT_THROW(validate(o), Error);
  o = ScenarioOptions{};
  o.duration = -1;
  EXPECT_THROW(validate(o), Error);
  o = ScenarioOptions{};
  o.dt_sim = 0.02;
  o.dt_ctrl = 0.02;
  EXPECT_THROW(validate(o), Error);
}

TEST(Scenario, UniformTimeAndHoverAtRest) {
  const StructureModel s = four_t_structure();
  const auto a = analyze_structure(s, 0.645);
  ScenarioOptions o;
  o.duration = 1.0;
  const Telemetry t = run_scenario(s, a, ControllerGains{}, Trajectory{HoverParams{}}, o);
  ASSERT_EQ(t.samples.size(), 501u);
  for (std::size_t k = 0; k < t.samples.size(); ++k) {
    EXPECT_NEAR(t.samples[k].t, k * 0.002, 1e-12);
    EXPECT_LT((t.samples[k].state.position - Vec3(0, 0, 0.5)).norm(), 1e-9);
  }
}

TEST(Scenario, RecoversFromOffset) {
  const StructureModel s = single_module(make_r_module(ry(kPi / 18)));
  const auto a = analyze_structure(s, 0.645);
  ScenarioOptions o;
  o.duration = 8.0;
  VehicleState x0;
  x0.position = Vec3(0.2, -0.1, 0.4);
  x0.attitude = ry(kPi / 18).transpose();
  o.initial_state = x0;
  const Telemetry t = run_scenario(s, a, ControllerGains{}, Trajectory{HoverParams{}}, o);
  ASSERT_FALSE(t.diverged);
  const auto& last = t.samples.back();
  EXPECT_LT((last.state.position - Vec3(0, 0, 0.5)).norm(), 1e-3);
  // hovering F-frame level: W R_S = S R_F^T
  EXPECT_LT((last.state.attitude - ry(kPi / 18).transpose()).norm(), 1e-3);
}

TEST(Scenario, DivergenceStopsRun) {
  const StructureModel s = vertical_2x2();
  const auto a = analyze_structure(s, 0.645);
  ScenarioOptions o;
  o.duration = 10.0;
  VehicleState x0;
  x0.position = Vec3(0, 0, 99.9);
  x0.velocity = Vec3(0, 0, 50);
  o.initial_state = x0;
  const Telemetry t = run_scenario(s, a, ControllerGains{}, Trajectory{HoverParams{}}, o);
  EXPECT_TRUE(t.diverged);
  EXPECT_FALSE(t.failure.empty());
  EXPECT_LT(t.samples.size(), 5001u);
  for (const auto& smp : t.samples) EXPECT_LE(smp.state.position.norm(), kDivergenceRadius);
  try {
    t.throw_if_diverged();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteState);
  }
}

TEST(Scenario, SamplesStayInsideMotorLimits) {
  const StructureConfig c = load_config(fixture("exp4.cfg"));
  const StructureModel s = build_structure(c);
  const auto a = analyze_structure(s, c.f_max);
  ScenarioOptions o = scenario_options(c);
  o.duration = 25.0;
  const Telemetry t = run_scenario(s, a, c.gains, Trajectory{c.scenario->trajectory}, o);
  for (const auto& smp : t.samples) {
    EXPECT_GE(smp.u_actual.minCoeff(), 0.0);
    EXPECT_LE(smp.u_actual.maxCoeff(), c.f_max);
  }
}

double final_state_gap(const std::string& name, double duration) {
  const StructureConfig c = load_config(fixture(name));
  const StructureModel s = build_structure(c);
  const auto a = analyze_structure(s, c.f_max);
  ScenarioOptions o = scenario_options(c);
  o.duration = duration;
  const Trajectory traj{c.scenario->trajectory};
  const VehicleState x1 = run_scenario(s, a, c.gains, traj, o).samples.back().state;
  o.dt_sim *= 0.5;
  const VehicleState x2 = run_scenario(s, a, c.gains, traj, o).samples.back().state;
  return std::max({(x1.position - x2.position).norm(), (x1.velocity - x2.velocity).norm(),
                   (x1.attitude - x2.attitude).norm(),
                   (x1.angular_velocity - x2.angular_velocity).norm()});
}

TEST(ScenarioProperty, HalvingStepBarelyChangesResult) {
  for (const char* name : {"exp1.cfg", "exp2.cfg", "exp6.cfg", "sim3.cfg"}) {
    EXPECT_LT(final_state_gap(name, 10.0), 1e-5) << name;
  }
}

double max_position_error(const std::string& name, double f_max, double duration) {
  StructureConfig c = load_config(fixture(name));
  c.f_max = f_max;
  const StructureModel s = build_structure(c);
  const auto a = analyze_structure(s, f_max);
  ScenarioOptions o = scenario_options(c);
  o.duration = duration;
  const Telemetry t = run_scenario(s, a, c.gains, Trajectory{c.scenario->trajectory}, o);
  if (t.diverged) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const auto& smp : t.samples) {
    worst = std::max(worst, (smp.state.position - smp.position_d).cwiseAbs().maxCoeff());
  }
  return worst;
}

TEST(ScenarioProperty, SaturationMonotonicity) {
  for (const char* name : {"exp1.cfg", "exp4.cfg", "exp2.cfg"}) {
    const double e_lo = max_position_error(name, 0.5, 30.0);
    const double e_mid = max_position_error(name, 0.645, 30.0);
    const double e_hi = max_position_error(name, 1.0, 30.0);
    EXPECT_GE(e_lo, e_mid) << name;
    EXPECT_GE(e_mid, e_hi) << name;
  }
}

TEST(ScenarioProperty, BitIdenticalRuns) {
  const StructureConfig c = load_config(fixture("sim2.cfg"));
  const StructureModel s = build_structure(c);
  const auto a = analyze_structure(s, c.f_max);
  ScenarioOptions o = scenario_options(c);
  o.duration = 5.0;
  const Trajectory traj{c.scenario->trajectory};
  const Telemetry t1 = run_scenario(s, a, c.gains, traj, o);
  const Telemetry t2 = run_scenario(s, a, c.gains, traj, o);
  ASSERT_EQ(t1.samples.size(), t2.samples.size());
  for (std::size_t k = 0; k < t1.samples.size(); ++k) {
    EXPECT_EQ(t1.samples[k].state.position, t2.samples[k].state.position);
    EXPECT_EQ(t1.samples[k].state.attitude, t2.samples[k].state.attitude);
    EXPECT_EQ(t1.samples[k].u_cmd, t2.samples[k].u_cmd);
  }
}

}  // namespace
}  // namespace modquad

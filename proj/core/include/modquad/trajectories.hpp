#pragma once

#include <variant>
#include <vector>

#include <Eigen/Core>

#include "modquad/control.hpp"
#include "modquad/geometry.hpp"

namespace modquad {

/// Desired motion at one instant. Attitude is described by yaw and pitch of
/// the F-frame, R_d = Rz(yaw) Ry(pitch), with their rates.
struct Reference {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;
  double pitch = 0.0;
  double pitch_rate = 0.0;
};

struct HelixParams {
  Eigen::Vector2d center{-0.5, 0.0};
  double radius = 0.45;
  double z_min = 0.45;
  double z_max = 0.95;
  double z_period = 14.0;
  double xy_period = 10.0;
  double yaw_period = 18.0;
  bool operator==(const HelixParams&) const = default;
};

struct RectangleParams {
  Vec3 start{0.0, 0.0, 0.5};  // first corner; edges run +x, +y, -x, -y
  double length = 0.8;        // along x
  double width = 0.6;         // along y
  double lap_time = 24.0;
  double pitch_hold = 0.0;
  double yaw_hold = 0.0;
  bool operator==(const RectangleParams&) const = default;
};

/// Oscillation about the world y (pitch) or z (yaw) axis while holding position.
struct AttitudeSineParams {
  Axis axis = Axis::kY;
  double amplitude = 0.0;  // rad
  double period = 90.0;
  Vec3 hover_point{0.0, 0.0, 0.5};
  bool operator==(const AttitudeSineParams&) const = default;
};

struct Waypoint {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  double pitch = 0.0;
  bool operator==(const Waypoint&) const = default;
};

/// Rest-to-rest quintic segments between consecutive waypoints; holds the last.
struct QuinticChainParams {
  std::vector<Waypoint> waypoints;
  std::vector<double> durations;  // one per segment
  bool operator==(const QuinticChainParams&) const = default;
};

struct HoverParams {
  Vec3 position{0.0, 0.0, 0.5};
  double yaw = 0.0;
  double pitch = 0.0;
  bool operator==(const HoverParams&) const = default;
};

using TrajectoryDef = std::variant<HelixParams, RectangleParams, AttitudeSineParams,
                                   QuinticChainParams, HoverParams>;

const char* trajectory_kind(const TrajectoryDef& def) noexcept;

/// Throws InvalidParams on non-positive periods or durations, fewer than two
/// waypoints, or an attitude sine about x.
void validate(const TrajectoryDef& def);

Reference helix(double t, const HelixParams& p);
Reference rectangle(double t, const RectangleParams& p);
Reference attitude_sine(double t, const AttitudeSineParams& p);
Reference hover(double t, const HoverParams& p);

struct QuinticBoundary {
  Eigen::VectorXd position;
  Eigen::VectorXd velocity;
  Eigen::VectorXd acceleration;
};

/// Column c holds the coefficients of dimension c, lowest order first.
struct QuinticSegment {
  Eigen::Matrix<double, 6, Eigen::Dynamic> coeffs;
  double duration = 0.0;
};

struct QuinticSample {
  Eigen::VectorXd position;
  Eigen::VectorXd velocity;
  Eigen::VectorXd acceleration;
};

/// Degree-5 polynomial per dimension matching position, velocity and
/// acceleration at both ends. Throws SingularSystem when T <= 0 or the
/// boundary system cannot be solved, InvalidParams on mismatched sizes.
QuinticSegment quintic_segment(const QuinticBoundary& b0, const QuinticBoundary& b1, double T);

/// Throws OutOfRange unless 0 <= t <= T.
QuinticSample quintic_eval(const QuinticSegment& segment, double t);

class QuinticChain {
 public:
  explicit QuinticChain(const QuinticChainParams& params);
  Reference operator()(double t) const;
  double duration() const { return total_; }

 private:
  std::vector<QuinticSegment> segments_;
  std::vector<double> starts_;
  double total_ = 0.0;
};

/// Default finite-difference step for desired angular velocity.
inline constexpr double kAttitudeRateStep = 1e-3;

class Trajectory {
 public:
  explicit Trajectory(TrajectoryDef def);

  Reference reference(double t) const;

  /// Setpoint for a structure with the given controllable DOF. For DOF 6 the
  /// desired rate is analytic; otherwise it is a central difference (step h)
  /// of the feed-forward desired attitude.
  Setpoint setpoint(double t, int dof, double h = kAttitudeRateStep,
                    double gravity = kGravity) const;

  const TrajectoryDef& def() const { return def_; }

 private:
  Mat3 feedforward_attitude(double t, int dof, double gravity) const;

  TrajectoryDef def_;
  std::vector<QuinticChain> chain_;  // empty unless quintic_chain
};

/// Body rate of R(t) = Rz(yaw) Ry(pitch) expressed in the rotating frame.
Vec3 yaw_pitch_body_rate(double pitch, double yaw_rate, double pitch_rate);

}  // namespace modquad

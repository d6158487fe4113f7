#include "modquad/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/LU>

#include "modquad/error.hpp"

namespace modquad {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << what << " must be positive, got " << v;
    throw Error(ErrorCode::kInvalidParams, msg.str());
  }
}

// Rest-to-rest profile s(tau) = 10 tau^3 - 15 tau^4 + 6 tau^5 and derivatives in tau.
struct Blend {
  double s, ds, dds;
};

Blend rest_to_rest(double tau) {
  const double t2 = tau * tau;
  const double t3 = t2 * tau;
  return {t3 * (10.0 - 15.0 * tau + 6.0 * t2), 30.0 * t2 * (1.0 - 2.0 * tau + t2),
          60.0 * tau * (1.0 - 3.0 * tau + 2.0 * t2)};
}

}  // namespace

const char* trajectory_kind(const TrajectoryDef& def) noexcept {
  switch (def.index()) {
    case 0: return "helix";
    case 1: return "rectangle";
    case 2: return "attitude_sine";
    case 3: return "quintic_chain";
    default: return "hover";
  }
}

void validate(const TrajectoryDef& def) {
  if (const auto* h = std::get_if<HelixParams>(&def)) {
    require_positive(h->radius, "helix radius");
    require_positive(h->z_period, "helix z period");
    require_positive(h->xy_period, "helix xy period");
    require_positive(h->yaw_period, "helix yaw period");
    if (h->z_max < h->z_min) throw Error(ErrorCode::kInvalidParams, "helix z_max < z_min");
  } else if (const auto* r = std::get_if<RectangleParams>(&def)) {
    require_positive(r->length, "rectangle length");
    require_positive(r->width, "rectangle width");
    require_positive(r->lap_time, "rectangle lap time");
  } else if (const auto* a = std::get_if<AttitudeSineParams>(&def)) {
    require_positive(a->period, "attitude sine period");
    if (a->axis == Axis::kX) {
      throw Error(ErrorCode::kInvalidParams, "attitude sine axis must be y (pitch) or z (yaw)");
    }
  } else if (const auto* q = std::get_if<QuinticChainParams>(&def)) {
    if (q->waypoints.size() < 2) {
      throw Error(ErrorCode::kInvalidParams, "quintic chain needs at least two waypoints");
    }
    if (q->durations.size() + 1 != q->waypoints.size()) {
      throw Error(ErrorCode::kInvalidParams, "quintic chain needs one duration per segment");
    }
    for (double d : q->durations) require_positive(d, "segment duration");
  }
}

Reference helix(double t, const HelixParams& p) {
  Reference r;
  const double w_xy = kTwoPi / p.xy_period;
  const double w_z = kTwoPi / p.z_period;
  const double mid = 0.5 * (p.z_min + p.z_max);
  const double amp = 0.5 * (p.z_max - p.z_min);
  const double c = std::cos(w_xy * t);
  const double s = std::sin(w_xy * t);
  r.position << p.center.x() + p.radius * c, p.center.y() + p.radius * s,
      mid - amp * std::cos(w_z * t);
  r.velocity << -p.radius * w_xy * s, p.radius * w_xy * c, amp * w_z * std::sin(w_z * t);
  r.acceleration << -p.radius * w_xy * w_xy * c, -p.radius * w_xy * w_xy * s,
      amp * w_z * w_z * std::cos(w_z * t);
  r.yaw_rate = kTwoPi / p.yaw_period;
  r.yaw = wrap_angle(r.yaw_rate * t);
  return r;
}

Reference rectangle(double t, const RectangleParams& p) {
  const std::array<Vec3, 4> dirs{Vec3::UnitX(), Vec3::UnitY(), -Vec3::UnitX(), -Vec3::UnitY()};
  const std::array<double, 4> lens{p.length, p.width, p.length, p.width};
  const double perimeter = 2.0 * (p.length + p.width);

  double tau = std::fmod(std::max(t, 0.0), p.lap_time);
  Vec3 corner = p.start;
  Reference r;
  r.pitch = p.pitch_hold;
  r.yaw = p.yaw_hold;
  for (std::size_t k = 0; k < 4; ++k) {
    const double edge_time = p.lap_time * lens[k] / perimeter;
    if (tau <= edge_time || k == 3) {
      const Blend b = rest_to_rest(std::min(tau / edge_time, 1.0));
      r.position = corner + dirs[k] * (lens[k] * b.s);
      r.velocity = dirs[k] * (lens[k] * b.ds / edge_time);
      r.acceleration = dirs[k] * (lens[k] * b.dds / (edge_time * edge_time));
      return r;
    }
    tau -= edge_time;
    corner += dirs[k] * lens[k];
  }
  return r;
}

Reference attitude_sine(double t, const AttitudeSineParams& p) {
  Reference r;
  r.position = p.hover_point;
  const double w = kTwoPi / p.period;
  const double angle = p.amplitude * std::sin(w * t);
  const double rate = p.amplitude * w * std::cos(w * t);
  if (p.axis == Axis::kZ) {
    r.yaw = angle;
    r.yaw_rate = rate;
  } else {
    r.pitch = angle;
    r.pitch_rate = rate;
  }
  return r;
}

Reference hover(double, const HoverParams& p) {
  Reference r;
  r.position = p.position;
  r.yaw = p.yaw;
  r.pitch = p.pitch;
  return r;
}

QuinticSegment quintic_segment(const QuinticBoundary& b0, const QuinticBoundary& b1, double T) {
  const Eigen::Index n = b0.position.size();
  if (b0.velocity.size() != n || b0.acceleration.size() != n || b1.position.size() != n ||
      b1.velocity.size() != n || b1.acceleration.size() != n) {
    throw Error(ErrorCode::kInvalidParams, "quintic boundary conditions differ in dimension");
  }
  if (!(T > 0.0) || !std::isfinite(T)) {
    std::ostringstream msg;
    msg << "segment duration " << T << " gives a singular boundary system";
    throw Error(ErrorCode::kSingularSystem, msg.str());
  }
  Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 2) = 2.0;
  for (int k = 0; k < 6; ++k) {
    m(3, k) = std::pow(T, k);
    if (k >= 1) m(4, k) = k * std::pow(T, k - 1);
    if (k >= 2) m(5, k) = k * (k - 1) * std::pow(T, k - 2);
  }
  const Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(m);
  if (!lu.isInvertible()) throw Error(ErrorCode::kSingularSystem, "quintic boundary system");

  Eigen::Matrix<double, 6, Eigen::Dynamic> rhs(6, n);
  rhs.row(0) = b0.position.transpose();
  rhs.row(1) = b0.velocity.transpose();
  rhs.row(2) = b0.acceleration.transpose();
  rhs.row(3) = b1.position.transpose();
  rhs.row(4) = b1.velocity.transpose();
  rhs.row(5) = b1.acceleration.transpose();
  return QuinticSegment{lu.solve(rhs), T};
}

QuinticSample quintic_eval(const QuinticSegment& segment, double t) {
  if (!(t >= 0.0 && t <= segment.duration)) {
    std::ostringstream msg;
    msg << "t = " << t << " outside [0, " << segment.duration << "]";
    throw Error(ErrorCode::kOutOfRange, msg.str());
  }
  Eigen::Matrix<double, 6, 1> p, v, a;
  for (int k = 0; k < 6; ++k) {
    p(k) = std::pow(t, k);
    v(k) = k >= 1 ? k * std::pow(t, k - 1) : 0.0;
    a(k) = k >= 2 ? k * (k - 1) * std::pow(t, k - 2) : 0.0;
  }
  return QuinticSample{segment.coeffs.transpose() * p, segment.coeffs.transpose() * v,
                       segment.coeffs.transpose() * a};
}

QuinticChain::QuinticChain(const QuinticChainParams& params) {
  validate(TrajectoryDef{params});
  const auto pack = [](const Waypoint& w) {
    Eigen::VectorXd v(5);
    v << w.position, w.yaw, w.pitch;
    return v;
  };
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(5);
  for (std::size_t k = 0; k + 1 < params.waypoints.size(); ++k) {
    starts_.push_back(total_);
    segments_.push_back(quintic_segment({pack(params.waypoints[k]), zero, zero},
                                        {pack(params.waypoints[k + 1]), zero, zero},
                                        params.durations[k]));
    total_ += params.durations[k];
  }
}

Reference QuinticChain::operator()(double t) const {
  std::size_t k = 0;
  while (k + 1 < segments_.size() && t >= starts_[k + 1]) ++k;
  const double local = std::clamp(t - starts_[k], 0.0, segments_[k].duration);
  const QuinticSample s = quintic_eval(segments_[k], local);
  Reference r;
  r.position = s.position.head<3>();
  r.velocity = s.velocity.head<3>();
  r.acceleration = s.acceleration.head<3>();
  r.yaw = s.position(3);
  r.yaw_rate = s.velocity(3);
  r.pitch = s.position(4);
  r.pitch_rate = s.velocity(4);
  if (t > total_ || t < 0.0) {
    r.velocity.setZero();
    r.acceleration.setZero();
    r.yaw_rate = 0.0;
    r.pitch_rate = 0.0;
  }
  return r;
}

Vec3 yaw_pitch_body_rate(double pitch, double yaw_rate, double pitch_rate) {
  return rot_principal(Axis::kY, pitch).transpose() * Vec3(0.0, 0.0, yaw_rate) +
         Vec3(0.0, pitch_rate, 0.0);
}

Trajectory::Trajectory(TrajectoryDef def) : def_(std::move(def)) {
  validate(def_);
  if (const auto* q = std::get_if<QuinticChainParams>(&def_)) chain_.emplace_back(*q);
}

Reference Trajectory::reference(double t) const {
  return std::visit(
      [&](const auto& p) -> Reference {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, HelixParams>) return helix(t, p);
        else if constexpr (std::is_same_v<T, RectangleParams>) return rectangle(t, p);
        else if constexpr (std::is_same_v<T, AttitudeSineParams>) return attitude_sine(t, p);
        else if constexpr (std::is_same_v<T, QuinticChainParams>) return chain_.front()(t);
        else return hover(t, p);
      },
      def_);
}

Mat3 Trajectory::feedforward_attitude(double t, int dof, double gravity) const {
  const Reference r = reference(t);
  const Vec3 a = gravity * Vec3::UnitZ() + r.acceleration;
  if (dof == 4) return desired_attitude_4dof(a, r.yaw);
  if (dof == 5) return desired_attitude_5dof(a, r.yaw, r.pitch);
  return rot_principal(Axis::kZ, r.yaw) * rot_principal(Axis::kY, r.pitch);
}

Setpoint Trajectory::setpoint(double t, int dof, double h, double gravity) const {
  if (dof < 4 || dof > 6) {
    std::ostringstream msg;
    msg << "controllable DOF must be 4, 5 or 6, got " << dof;
    throw Error(ErrorCode::kInvalidDof, msg.str());
  }
  const Reference r = reference(t);
  Setpoint sp;
  sp.position = r.position;
  sp.velocity = r.velocity;
  sp.acceleration = r.acceleration;
  if (dof == 6) {
    sp.mode = AttitudeTarget{rot_principal(Axis::kZ, r.yaw) * rot_principal(Axis::kY, r.pitch)};
    sp.angular_velocity = yaw_pitch_body_rate(r.pitch, r.yaw_rate, r.pitch_rate);
    return sp;
  }
  if (dof == 4) {
    sp.mode = YawTarget{r.yaw};
  } else {
    sp.mode = YawPitchTarget{r.yaw, r.pitch};
  }
  const double t0 = std::max(t - h, 0.0);
  const double t1 = t + h;
  const Mat3 r0 = feedforward_attitude(t0, dof, gravity);
  const Mat3 r1 = feedforward_attitude(t1, dof, gravity);
  const Mat3 rc = feedforward_attitude(t, dof, gravity);
  // Constant-rate arc from r0 to r1; its world rate r0 * xi re-expressed at t.
  const Vec3 xi = so3_log(r0.transpose() * r1) / (t1 - t0);
  sp.angular_velocity = rc.transpose() * r0 * xi;
  return sp;
}

}  // namespace modquad

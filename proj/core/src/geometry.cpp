#include "modquad/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

#include "modquad/error.hpp"

namespace modquad {

Mat3 hat(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Vec3 vee(const Mat3& s, double tol) {
  const double asym = (s + s.transpose()).norm();
  if (!(asym < tol)) {
    std::ostringstream msg;
    msg << "||S + S^T|| = " << asym << " exceeds " << tol;
    throw Error(ErrorCode::kNotSkewSymmetric, msg.str());
  }
  return Vec3(s(2, 1), s(0, 2), s(1, 0));
}

Mat3 rodrigues(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(std::abs(n - 1.0) <= 1e-9)) {
    std::ostringstream msg;
    msg << "axis norm " << n << " is not 1";
    throw Error(ErrorCode::kNonUnitAxis, msg.str());
  }
  const Mat3 p = hat(axis);
  return Mat3::Identity() + std::sin(angle) * p + (1.0 - std::cos(angle)) * p * p;
}

Vec3 unit(Axis axis) {
  switch (axis) {
    case Axis::kX: return Vec3::UnitX();
    case Axis::kY: return Vec3::UnitY();
    case Axis::kZ: return Vec3::UnitZ();
  }
  return Vec3::UnitZ();
}

Mat3 rot_principal(Axis axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r;
  switch (axis) {
    case Axis::kX:
      r << 1, 0, 0,
           0, c, -s,
           0, s, c;
      break;
    case Axis::kY:
      r << c, 0, s,
           0, 1, 0,
           -s, 0, c;
      break;
    case Axis::kZ:
      r << c, -s, 0,
           s, c, 0,
           0, 0, 1;
      break;
  }
  return r;
}

Mat3 so3_exp(const Vec3& omega, double dt) {
  const double rate = omega.norm();
  const double angle = rate * dt;
  if (!(rate > 1e-12) || std::abs(angle) < 1e-12) {
    return Mat3::Identity();
  }
  return rodrigues(omega / rate, angle);
}

Vec3 so3_log(const Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

double orthonormality_error(const Mat3& r) {
  return (r.transpose() * r - Mat3::Identity()).norm();
}

bool is_rotation(const Mat3& r, double tol) {
  return r.allFinite() && orthonormality_error(r) < tol &&
         std::abs(r.determinant() - 1.0) < tol;
}

Mat3 project_to_so3(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) {
    u.col(2) = -u.col(2);
  }
  return u * v.transpose();
}

EulerZYX euler_zyx(const Mat3& r) {
  EulerZYX e;
  e.pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  e.yaw = std::atan2(r(1, 0), r(0, 0));
  e.roll = std::atan2(r(2, 1), r(2, 2));
  return e;
}

Mat3 from_euler_zyx(const EulerZYX& e) {
  return rot_principal(Axis::kZ, e.yaw) * rot_principal(Axis::kY, e.pitch) *
         rot_principal(Axis::kX, e.roll);
}

double wrap_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle + std::numbers::pi, kTwoPi);
  if (a <= 0.0) a += kTwoPi;
  return a - std::numbers::pi;
}

}  // namespace modquad

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace modquad {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kGravity = 9.81;

enum class Axis { kX, kY, kZ };

/// Skew-symmetric matrix S with S * w == v.cross(w).
Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws NotSkewSymmetric when ||S + S^T||_F >= tol.
Vec3 vee(const Mat3& s, double tol = 1e-9);

/// R = I + sin(angle) P + (1 - cos(angle)) P^2 with P = hat(axis).
/// The axis must be unit length within 1e-9 (NonUnitAxis otherwise).
Mat3 rodrigues(const Vec3& axis, double angle);

Mat3 rot_principal(Axis axis, double angle);

Vec3 unit(Axis axis);

/// Rotation reached after spinning at body rate omega for dt seconds.
Mat3 so3_exp(const Vec3& omega, double dt);

/// Rotation vector (angle * axis) of r, angle in [0, pi].
Vec3 so3_log(const Mat3& r);

/// ||R^T R - I||_F
double orthonormality_error(const Mat3& r);

/// True when r is orthonormal with det 1, both within tol.
bool is_rotation(const Mat3& r, double tol = 1e-9);

/// Closest rotation in the Frobenius sense (polar decomposition).
Mat3 project_to_so3(const Mat3& m);

struct EulerZYX {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

/// Intrinsic z-y-x angles, R = Rz(yaw) Ry(pitch) Rx(roll).
EulerZYX euler_zyx(const Mat3& r);
Mat3 from_euler_zyx(const EulerZYX& e);

/// Wraps to (-pi, pi].
double wrap_angle(double angle);

}  // namespace modquad

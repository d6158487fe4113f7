#pragma once

// Reference computations written independently of the library code paths.

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "modquad/config.hpp"
#include "modquad/geometry.hpp"
#include "modquad/vehicle.hpp"

namespace modquad::testing {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg(double d) { return d * kPi / 180.0; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return Vec3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

inline Mat3 rx(double t) {
  Mat3 r;
  r << 1, 0, 0, 0, std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t);
  return r;
}
inline Mat3 ry(double t) {
  Mat3 r;
  r << std::cos(t), 0, std::sin(t), 0, 1, 0, -std::sin(t), 0, std::cos(t);
  return r;
}
inline Mat3 rz(double t) {
  Mat3 r;
  r << std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t), 0, 0, 0, 1;
  return r;
}

/// Rotation through Eigen's quaternion-based angle-axis path.
inline Mat3 angle_axis(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

/// Singular values from the eigenvalues of M M^T, descending.
inline Eigen::VectorXd singular_values_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m * m.transpose());
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return ev.reverse();
}

inline int rank_qr(const Eigen::MatrixXd& m, double tol = 1e-8) {
  Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(tol);
  return static_cast<int>(qr.rank());
}

/// Minimum-norm solution for a full-row-rank system.
inline Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& b) {
  return m.transpose() * (m * m.transpose()).ldlt().solve(b);
}

/// Orthonormal basis of the null space of m, by column.
inline Eigen::MatrixXd null_space(const Eigen::MatrixXd& m) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-10);
  Eigen::MatrixXd k = lu.kernel();
  return Eigen::HouseholderQR<Eigen::MatrixXd>(k).householderQ() *
         Eigen::MatrixXd::Identity(k.rows(), k.cols());
}

/// Column of a design matrix, from the physics definition.
inline Eigen::Matrix<double, 6, 1> rotor_column(const Vec3& p, const Mat3& r, int spin,
                                                double ratio) {
  const Vec3 f = r * Vec3(0, 0, 1);
  Eigen::Matrix<double, 6, 1> c;
  c << f, cross(p, f) + spin * ratio * f;
  return c;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vec3 v(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-6) v = Vec3(n(rng), n(rng), n(rng));
  return v.normalized();
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  return angle_axis(random_unit(rng), u(rng));
}

/// Four eta = +-pi/4 T-modules, like types on one diagonal.
inline StructureModel four_t_structure(double eta = kPi / 4) {
  std::vector<ModulePlacement> p;
  p.push_back({make_t_module(eta), {0, 0, 0}, Mat3::Identity()});
  p.push_back({make_t_module(-eta), {1, 0, 0}, Mat3::Identity()});
  p.push_back({make_t_module(-eta), {0, 1, 0}, Mat3::Identity()});
  p.push_back({make_t_module(eta), {1, 1, 0}, Mat3::Identity()});
  return assemble_structure(p);
}

inline StructureModel single_module(const ModuleSpec& m) {
  std::vector<ModulePlacement> p{{m, {0, 0, 0}, Mat3::Identity()}};
  return assemble_structure(p);
}

/// Two R-modules pitched +-30 degrees, adjacent along x.
inline StructureModel two_r_structure(double tilt = kPi / 6) {
  std::vector<ModulePlacement> p;
  p.push_back({make_r_module(ry(tilt)), {0, 0, 0}, Mat3::Identity()});
  p.push_back({make_r_module(ry(-tilt)), {1, 0, 0}, Mat3::Identity()});
  return assemble_structure(p);
}

inline StructureModel vertical_2x2() {
  std::vector<ModulePlacement> p;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) p.push_back({make_r_module(Mat3::Identity()), {i, j, 0}, Mat3::Identity()});
  return assemble_structure(p);
}

inline std::string fixture(const std::string& name) {
  return std::string(MODQUAD_FIXTURE_DIR) + "/" + name;
}

}  // namespace modquad::testing

#include "modquad/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

#include "modquad/error.hpp"

namespace modquad {

namespace {

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
}

int rank_from(const Eigen::VectorXd& sigma, double tol_rel) {
  if (sigma.size() == 0 || !(sigma(0) > 0.0)) return 0;
  const double threshold = tol_rel * sigma(0);
  return static_cast<int>((sigma.array() > threshold).count());
}

// Makes the sign of v deterministic: positive along e1, else e2, else e3.
Vec3 canonical_sign(const Vec3& v) {
  for (int k = 0; k < 3; ++k) {
    if (std::abs(v(k)) > 1e-9) return v(k) > 0.0 ? v : Vec3(-v);
  }
  return v;
}

// x axis perpendicular to z that minimises the rotation angle of [x, z x x, z]
// from the identity: maximises trace, i.e. x . (e1 + e2 x z).
Vec3 min_rotation_x(const Vec3& z) {
  Vec3 v = Vec3::UnitX() + Vec3::UnitY().cross(z);
  v -= v.dot(z) * z;
  if (v.norm() < 1e-9) {
    v = Vec3::UnitX() - Vec3::UnitX().dot(z) * z;
    if (v.norm() < 1e-9) v = Vec3::UnitY() - Vec3::UnitY().dot(z) * z;
  }
  return v.normalized();
}

}  // namespace

int numerical_rank(const Eigen::MatrixXd& m, double tol_rel) {
  return rank_from(singular_values(m), tol_rel);
}

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double tol_rel) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  const double threshold = s.size() > 0 ? tol_rel * s(0) : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > threshold) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

ActuationAnalysis analyze(const DesignMatrix& a, double tol_rel) {
  ActuationAnalysis r;
  const Eigen::MatrixXd af = a.topRows<3>();
  const Eigen::MatrixXd atau = a.bottomRows<3>();
  r.rank_a = numerical_rank(a, tol_rel);
  r.rank_atau = numerical_rank(atau, tol_rel);
  if (r.rank_atau < 3) {
    std::ostringstream msg;
    msg << "rank(A_tau) = " << r.rank_atau << " < 3";
    throw Error(ErrorCode::kDegenerateStructure, msg.str());
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(af, Eigen::ComputeFullU);
  const Eigen::VectorXd sigma = svd.singularValues();
  r.rank_af = rank_from(sigma, tol_rel);
  r.raw_singular_values.head(sigma.size()) = sigma;
  if (sigma(0) > 0.0) r.singular_values = r.raw_singular_values / sigma(0);
  r.singular_vectors = svd.matrixU();
  // Report signs: major axis along the summed thrust, the rest by largest component.
  const Vec3 total = af.rowwise().sum();
  for (int i = 0; i < 3; ++i) {
    auto c = r.singular_vectors.col(i);
    Eigen::Index k = 0;
    c.cwiseAbs().maxCoeff(&k);
    const double s = (i == 0 && total.norm() > 0.0) ? c.dot(total) : c(k);
    if (s < 0.0) c = -c;
  }

  r.dependent_rows = r.rank_atau + r.rank_af - r.rank_a;
  r.controllable_dof = 3 + r.rank_af - r.dependent_rows;
  if (r.controllable_dof >= 4 && r.controllable_dof <= 6) {
    r.dimensioning = dimensioning_matrix(r.controllable_dof);
  }
  return r;
}

FFrame f_frame(const Eigen::Matrix3Xd& af, const StructureModel& structure, double tol_rel) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(af, Eigen::ComputeFullU);
  Vec3 sigma = Vec3::Zero();
  sigma.head(svd.singularValues().size()) = svd.singularValues();
  const Mat3 u = svd.matrixU();
  const int rank = rank_from(svd.singularValues(), tol_rel);

  if (rank <= 1) {
    // All thrust axes are parallel: {F} is {S} rotated like the rotors.
    return FFrame{structure.rotor_orientation(0, 0), false};
  }

  const Vec3 mean = af.rowwise().sum();
  const auto tied = [&](int i, int j) {
    return std::abs(sigma(i) - sigma(j)) <= kTieTolerance * sigma(0);
  };
  const auto upward = [&](const Vec3& v) {
    const double d = v.dot(mean);
    if (std::abs(d) > 1e-12) return d > 0.0 ? v : Vec3(-v);
    return v.z() >= 0.0 ? v : Vec3(-v);
  };

  FFrame out;
  Vec3 z;
  Vec3 x;
  if (tied(0, 1) && tied(1, 2)) {
    z = mean.norm() > 1e-12 ? Vec3(mean.normalized()) : Vec3(Vec3::UnitZ());
    x = min_rotation_x(z);
    out.tied = true;
  } else if (tied(0, 1)) {
    const Vec3 n = u.col(2);
    const Vec3 in_plane = mean - mean.dot(n) * n;
    z = in_plane.norm() > 1e-12 ? Vec3(in_plane.normalized()) : upward(u.col(0));
    x = canonical_sign(n.cross(z).normalized());
    out.tied = true;
  } else {
    z = upward(u.col(0));
    if (tied(1, 2)) {
      x = min_rotation_x(z);
      out.tied = true;
    } else {
      x = canonical_sign(u.col(1));
    }
  }
  x = (x - x.dot(z) * z).normalized();
  out.rotation.col(0) = x;
  out.rotation.col(1) = z.cross(x);
  out.rotation.col(2) = z;
  return out;
}

BoundedLsResult bounded_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                      double lower, double upper, int max_iterations,
                                      double tol) {
  const auto clip = [&](const Eigen::VectorXd& v) {
    return Eigen::VectorXd(v.cwiseMax(lower).cwiseMin(upper));
  };
  BoundedLsResult out;
  out.x = clip(pseudo_inverse(a) * b);
  out.residual = (a * out.x - b).norm();
  if (out.residual <= tol) return out;

  const Eigen::VectorXd sigma = singular_values(a);
  const double lipschitz = sigma.size() > 0 ? sigma(0) * sigma(0) : 1.0;
  if (!(lipschitz > 0.0)) return out;
  const Eigen::MatrixXd ata = a.transpose() * a;
  const Eigen::VectorXd atb = a.transpose() * b;

  Eigen::VectorXd x = out.x;
  Eigen::VectorXd y = x;
  double t = 1.0;
  double previous = out.residual;
  for (int k = 1; k <= max_iterations; ++k) {
    const Eigen::VectorXd next = clip(y - (ata * y - atb) / lipschitz);
    const double residual = (a * next - b).norm();
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (residual > previous) {
      // adaptive restart
      y = x;
      t = 1.0;
      continue;
    }
    y = next + ((t - 1.0) / t_next) * (next - x);
    x = next;
    t = t_next;
    previous = residual;
    out.iterations = k;
    if (residual < out.residual) {
      out.x = x;
      out.residual = residual;
    }
    if (residual <= tol) break;
  }
  return out;
}

ApplicabilityReport applicability(const Eigen::Matrix3Xd& af, const Mat3& f_frame, double mass,
                                  double f_max, double gravity, int iterations) {
  ApplicabilityReport r;
  double min_cos = 1.0;
  for (Eigen::Index i = 0; i < af.cols(); ++i) {
    const Vec3 fi = af.col(i).normalized();
    for (Eigen::Index j = i + 1; j < af.cols(); ++j) {
      min_cos = std::min(min_cos, fi.dot(af.col(j).normalized()));
    }
  }
  r.max_pair_angle = std::acos(std::clamp(min_cos, -1.0, 1.0));
  // Obtuse beyond pi/2 + 1e-9 rad.
  r.obtuse_pair = min_cos < -std::sin(1e-9);

  const double weight = mass * gravity;
  const Eigen::VectorXd target = weight * f_frame.col(2);
  const auto hover = bounded_least_squares(af, target, 0.0, f_max, iterations, 1e-6 * weight);
  r.hover_residual = hover.residual;
  r.hover_thrust = hover.x;
  r.applicable = !r.obtuse_pair && hover.residual <= 1e-6 * weight;
  return r;
}

Eigen::MatrixXd dimensioning_matrix(int dof) {
  switch (dof) {
    case 4: {
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 6);
      d.rightCols<4>().setIdentity();
      return d;
    }
    case 5: {
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(5, 6);
      d(0, 0) = 1.0;
      d.bottomRightCorner<4, 4>().setIdentity();
      return d;
    }
    case 6:
      return Eigen::MatrixXd::Identity(6, 6);
    default: {
      std::ostringstream msg;
      msg << "controllable DOF must be 4, 5 or 6, got " << dof;
      throw Error(ErrorCode::kInvalidDof, msg.str());
    }
  }
}

DesignMatrix to_f_frame(const DesignMatrix& a, const Mat3& f_frame) {
  DesignMatrix out(6, a.cols());
  out.topRows<3>() = f_frame.transpose() * a.topRows<3>();
  out.bottomRows<3>() = f_frame.transpose() * a.bottomRows<3>();
  return out;
}

Eigen::VectorXd allocate(const DesignMatrix& a_f_frame, const Eigen::MatrixXd& d,
                         const Wrench6& w) {
  return pseudo_inverse(d * a_f_frame) * (d * w);
}

Allocator::Allocator(const DesignMatrix& a_f_frame, const Eigen::MatrixXd& d)
    : gain_(pseudo_inverse(d * a_f_frame) * d) {}

ActuationAnalysis analyze_structure(const StructureModel& structure, double f_max,
                                    double gravity, double tol_rel) {
  ActuationAnalysis r = analyze(structure.design, tol_rel);
  const Eigen::Matrix3Xd af = structure.design.topRows<3>();
  const FFrame frame = f_frame(af, structure, tol_rel);
  r.f_frame = frame.rotation;
  r.axes_tied = frame.tied;
  if (frame.tied) {
    r.notes.emplace_back(
        "equal singular values of A_f: F-frame axes chosen with minimal rotation from {S}");
  }
  const auto app = applicability(af, r.f_frame, structure.mass, f_max, gravity);
  r.applicable = app.applicable;
  r.obtuse_pair = app.obtuse_pair;
  r.max_pair_angle = app.max_pair_angle;
  r.hover_residual = app.hover_residual;
  r.hover_thrust = app.hover_thrust;
  if (app.obtuse_pair) {
    std::ostringstream msg;
    msg << "rotor thrust axes up to " << app.max_pair_angle * 180.0 / std::numbers::pi
        << " deg apart (obtuse pair)";
    r.notes.push_back(msg.str());
  }
  if (app.hover_residual > 1e-6 * structure.mass * gravity) {
    std::ostringstream msg;
    msg << "cannot hover along z_F with thrusts in [0, " << f_max
        << "] N (residual " << app.hover_residual << " N)";
    r.notes.push_back(msg.str());
  }
  return r;
}

}  // namespace modquad

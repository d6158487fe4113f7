#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "modquad/geometry.hpp"
#include "modquad/vehicle.hpp"

namespace modquad {

using Wrench6 = Eigen::Matrix<double, 6, 1>;

/// A singular value counts toward rank iff sigma > kRankTolerance * sigma_max.
inline constexpr double kRankTolerance = 1e-8;
/// Singular values closer than this (relative to sigma_max) are treated as tied.
inline constexpr double kTieTolerance = 1e-9;

/// Number of singular values above tol_rel * sigma_max.
int numerical_rank(const Eigen::MatrixXd& m, double tol_rel = kRankTolerance);

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double tol_rel = kRankTolerance);

struct ActuationAnalysis {
  int rank_a = 0;
  int rank_af = 0;
  int rank_atau = 0;
  int dependent_rows = 0;  // k: rows of A_f that depend on rows of A_tau
  int controllable_dof = 0;

  Vec3 singular_values = Vec3::Zero();      // of A_f, normalised by sigma_max
  Vec3 raw_singular_values = Vec3::Zero();  // of A_f
  Mat3 singular_vectors = Mat3::Identity(); // left singular vectors of A_f, by column

  Mat3 f_frame = Mat3::Identity();  // ^S R_F
  bool axes_tied = false;           // equal singular values; minimal-rotation axes chosen

  Eigen::MatrixXd dimensioning;  // D

  bool applicable = true;
  bool obtuse_pair = false;
  double max_pair_angle = 0.0;  // rad, widest angle between two rotor axes
  double hover_residual = 0.0;  // ||A_f u - m g z_F|| at the best u in [0, f_max]
  Eigen::VectorXd hover_thrust;
  std::vector<std::string> notes;
};

/// Ranks and controllable DOF of a design matrix, plus the SVD of A_f and D.
/// Throws DegenerateStructure when rank(A_tau) < 3.
ActuationAnalysis analyze(const DesignMatrix& a, double tol_rel = kRankTolerance);

struct FFrame {
  Mat3 rotation = Mat3::Identity();
  bool tied = false;
};

/// ^S R_F from the SVD of A_f. Rank-1 force maps reuse the rotor orientation;
/// otherwise z_F is the top singular vector and x_F the second one.
FFrame f_frame(const Eigen::Matrix3Xd& af, const StructureModel& structure,
               double tol_rel = kRankTolerance);

struct BoundedLsResult {
  Eigen::VectorXd x;
  double residual = 0.0;
  int iterations = 0;
};

/// min ||A x - b|| subject to lower <= x <= upper, by accelerated projected
/// gradient started from the clipped minimum-norm solution.
BoundedLsResult bounded_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                      double lower, double upper, int max_iterations,
                                      double tol);

struct ApplicabilityReport {
  bool applicable = true;
  bool obtuse_pair = false;
  double max_pair_angle = 0.0;  // rad
  double hover_residual = 0.0;
  Eigen::VectorXd hover_thrust;
};

/// False when two rotor axes are more than pi/2 apart or when no thrust vector
/// in [0, f_max] produces A_f u = m g z_F.
ApplicabilityReport applicability(const Eigen::Matrix3Xd& af, const Mat3& f_frame, double mass,
                                  double f_max, double gravity = kGravity,
                                  int iterations = 500);

/// Row selector: 4 -> [0 I4], 5 -> [[1 0] 0; 0 I4], 6 -> I6. Throws InvalidDOF.
Eigen::MatrixXd dimensioning_matrix(int dof);

/// blkdiag(R_F^T, R_F^T) * A: the design matrix with wrench rows in {F}.
DesignMatrix to_f_frame(const DesignMatrix& a, const Mat3& f_frame);

/// u = (D A_F)^+ D w
Eigen::VectorXd allocate(const DesignMatrix& a_f_frame, const Eigen::MatrixXd& d,
                         const Wrench6& w);

/// Caches (D A_F)^+ D for repeated allocation.
class Allocator {
 public:
  Allocator() = default;
  Allocator(const DesignMatrix& a_f_frame, const Eigen::MatrixXd& d);

  Eigen::VectorXd operator()(const Wrench6& w) const { return gain_ * w; }
  const Eigen::MatrixXd& gain() const { return gain_; }

 private:
  Eigen::MatrixXd gain_;
};

/// Full pipeline on an assembled structure: ranks, F-frame, D and applicability.
ActuationAnalysis analyze_structure(const StructureModel& structure, double f_max,
                                    double gravity = kGravity,
                                    double tol_rel = kRankTolerance);

}  // namespace modquad

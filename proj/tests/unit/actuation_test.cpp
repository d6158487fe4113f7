#include <gtest/gtest.h>

#include "modquad/actuation.hpp"
#include "modquad/error.hpp"
#include "oracles.hpp"

namespace modquad {
namespace {

using namespace modquad::testing;

constexpr double kG = 9.81;

ActuationAnalysis full(const StructureModel& s, double f_max = 0.645) {
  return analyze_structure(s, f_max);
}

TEST(Analyze, SingleRModule) {
  const StructureModel s = single_module(make_r_module(ry(kPi / 18)));
  const auto a = full(s);
  EXPECT_EQ(a.rank_af, 1);
  EXPECT_EQ(a.dependent_rows, 0);
  EXPECT_EQ(a.controllable_dof, 4);
  EXPECT_EQ(a.rank_a, 4);
  EXPECT_LT((a.f_frame - ry(kPi / 18)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_TRUE(a.applicable);
}

TEST(Analyze, TwoRModules) {
  const auto a = full(two_r_structure());
  EXPECT_EQ(a.rank_a, 5);
  EXPECT_EQ(a.rank_af, 2);
  EXPECT_EQ(a.controllable_dof, 5);
  EXPECT_LT((a.f_frame - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(a.dimensioning.rows(), 5);
  EXPECT_TRUE(a.applicable);
}

TEST(Analyze, FourTModules) {
  const auto a = full(four_t_structure());
  EXPECT_EQ(a.rank_a, 6);
  EXPECT_EQ(a.controllable_dof, 6);
  EXPECT_LT((a.f_frame - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_TRUE(a.applicable);
}

TEST(Analyze, VerticalGridHasFourDof) {
  const auto a = full(vertical_2x2());
  EXPECT_EQ(a.controllable_dof, 4);
  EXPECT_TRUE(a.f_frame.isApprox(Mat3::Identity()));
}

TEST(Analyze, RanksMatchIndependentOracle) {
  for (const StructureModel& s : {four_t_structure(), vertical_2x2(), two_r_structure(),
                                  single_module(make_r_module(ry(0.3)))}) {
    const auto a = analyze(s.design);
    EXPECT_EQ(a.rank_a, rank_qr(s.design));
    EXPECT_EQ(a.rank_af, rank_qr(s.design.topRows<3>()));
    EXPECT_EQ(a.rank_atau, rank_qr(s.design.bottomRows<3>()));
    EXPECT_EQ(a.controllable_dof, 3 + a.rank_af - a.dependent_rows);
    EXPECT_EQ(a.controllable_dof, a.rank_a);
    const Eigen::VectorXd sv = singular_values_eig(s.design.topRows<3>());
    EXPECT_NEAR(a.raw_singular_values(0), sv(0), 1e-9);
    EXPECT_NEAR(a.singular_values(0), 1.0, 1e-15);
  }
}

TEST(Analyze, DegenerateTorqueRows) {
  DesignMatrix a = DesignMatrix::Zero(6, 4);
  a.topRows<3>().setOnes();
  try {
    analyze(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateStructure);
  }
}

TEST(Analyze, ScalingInvariance) {
  const StructureModel s = two_r_structure();
  const auto a = analyze(s.design);
  const auto b = analyze(DesignMatrix(3.7 * s.design));
  EXPECT_EQ(a.controllable_dof, b.controllable_dof);
  const Eigen::Matrix3Xd af = s.design.topRows<3>();
  const Mat3 f1 = f_frame(af, s).rotation;
  const Mat3 f2 = f_frame(Eigen::Matrix3Xd(0.2 * af), s).rotation;
  EXPECT_TRUE(f1.isApprox(f2, 1e-12));
}

TEST(FFrame, IsRightHandedAndZAlongMeanThrust) {
  for (const StructureModel& s : {four_t_structure(), two_r_structure(),
                                  single_module(make_r_module(rx(0.4)))}) {
    const Eigen::Matrix3Xd af = s.design.topRows<3>();
    const Mat3 r = f_frame(af, s).rotation;
    EXPECT_TRUE(is_rotation(r, 1e-12));
    EXPECT_GT(r.col(2).dot(af.rowwise().sum()), 0.0);
    EXPECT_GT(analyze(s.design).singular_vectors.col(0).dot(af.rowwise().sum()), 0.0);
  }
}

TEST(FFrame, TiltedPairPointsBetweenThrusts) {
  // Vertical module next to one tilted -45 deg about y: z_F lies between them.
  std::vector<ModulePlacement> p;
  p.push_back({make_r_module(Mat3::Identity()), {0, 0, 0}, Mat3::Identity()});
  p.push_back({make_r_module(ry(-kPi / 4)), {1, 0, 0}, Mat3::Identity()});
  const StructureModel s = assemble_structure(p);
  const auto a = full(s);
  EXPECT_EQ(a.controllable_dof, 5);
  const Vec3 z = a.f_frame.col(2);
  EXPECT_NEAR(z.y(), 0.0, 1e-12);
  EXPECT_NEAR(std::atan2(-z.x(), z.z()), kPi / 8, 1e-9);
  EXPECT_TRUE(a.applicable);
}

TEST(FFrame, TopSingularDirectionIsSingularVector) {
  std::vector<ModulePlacement> p;
  p.push_back({make_r_module(ry(0.2)), {0, 0, 0}, Mat3::Identity()});
  p.push_back({make_r_module(rx(-0.5)), {1, 0, 0}, Mat3::Identity()});
  p.push_back({make_t_module(0.3), {0, 1, 0}, Mat3::Identity()});
  const StructureModel s = assemble_structure(p);
  const Eigen::Matrix3Xd af = s.design.topRows<3>();
  const Mat3 r = f_frame(af, s).rotation;
  const Mat3 aat = af * af.transpose();
  const Vec3 z = r.col(2);
  const double rayleigh = z.dot(aat * z);
  EXPECT_NEAR(rayleigh, std::pow(singular_values_eig(af)(0), 2), 1e-9);
}

TEST(EllipsoidProperty, NormBound) {
  const StructureModel s = four_t_structure();
  const Eigen::Matrix3Xd af = s.design.topRows<3>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(af, Eigen::ComputeFullV);
  const double smax = svd.singularValues()(0);
  std::mt19937_64 rng(19);
  std::normal_distribution<double> n;
  for (int i = 0; i < 10000; ++i) {
    Eigen::VectorXd u(af.cols());
    for (Eigen::Index k = 0; k < u.size(); ++k) u(k) = n(rng);
    u.normalize();
    EXPECT_LE((af * u).norm(), smax * (1 + 1e-12));
  }
  EXPECT_NEAR((af * svd.matrixV().col(0)).norm(), smax, 1e-6);
}

TEST(Applicability, ObtusePairRejected) {
  std::vector<ModulePlacement> p;
  p.push_back({make_r_module(ry(kPi / 3)), {0, 0, 0}, Mat3::Identity()});
  p.push_back({make_r_module(ry(-kPi / 3)), {1, 0, 0}, Mat3::Identity()});
  const auto a = full(assemble_structure(p));
  EXPECT_FALSE(a.applicable);
  EXPECT_TRUE(a.obtuse_pair);
  EXPECT_NEAR(a.max_pair_angle, 2 * kPi / 3, 1e-9);
}

TEST(Applicability, AcuteOpposingTiltsAccepted) {
  EXPECT_TRUE(full(two_r_structure(-kPi / 6)).applicable);
  EXPECT_TRUE(full(single_module(make_r_module(Mat3::Identity()))).applicable);
}

TEST(Applicability, WeakMotorsCannotHover) {
  const StructureModel s = single_module(make_r_module(Mat3::Identity()));
  const double mg = s.mass * kG;
  EXPECT_TRUE(full(s, mg / 4 * 1.001).applicable);
  const auto a = full(s, mg / 4 * 0.99);
  EXPECT_FALSE(a.applicable);
  EXPECT_FALSE(a.obtuse_pair);
  EXPECT_GT(a.hover_residual, 1e-3);
}

TEST(BoundedLeastSquares, RespectsBoundsAndSolvesFeasible) {
  const StructureModel s = four_t_structure();
  const Eigen::Matrix3Xd af = s.design.topRows<3>();
  const Eigen::VectorXd target = Vec3(0.3, -0.2, 5.0);
  const auto r = bounded_least_squares(af, target, 0.0, 0.645, 500, 1e-9);
  EXPECT_GE(r.x.minCoeff(), 0.0);
  EXPECT_LE(r.x.maxCoeff(), 0.645);
  EXPECT_LT(r.residual, 1e-6);
  EXPECT_NEAR((af * r.x - target).norm(), r.residual, 1e-12);
}

TEST(Dimensioning, Matrices) {
  Eigen::MatrixXd d4(4, 6);
  d4 << 0, 0, 1, 0, 0, 0,
        0, 0, 0, 1, 0, 0,
        0, 0, 0, 0, 1, 0,
        0, 0, 0, 0, 0, 1;
  EXPECT_EQ(dimensioning_matrix(4), d4);
  Eigen::MatrixXd d5(5, 6);
  d5 << 1, 0, 0, 0, 0, 0,
        0, 0, 1, 0, 0, 0,
        0, 0, 0, 1, 0, 0,
        0, 0, 0, 0, 1, 0,
        0, 0, 0, 0, 0, 1;
  EXPECT_EQ(dimensioning_matrix(5), d5);
  EXPECT_EQ(dimensioning_matrix(6), Eigen::MatrixXd::Identity(6, 6));
  for (int bad : {3, 7}) {
    try {
      dimensioning_matrix(bad);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidDof);
    }
  }
}

TEST(Allocate, ZeroWrench) {
  const StructureModel s = four_t_structure();
  const auto u = allocate(s.design, dimensioning_matrix(6), Wrench6::Zero());
  EXPECT_TRUE(u.isZero(0.0));
}

TEST(Allocate, FourTHover) {
  const StructureModel s = four_t_structure();
  const auto a = full(s);
  const DesignMatrix af = to_f_frame(s.design, a.f_frame);
  Wrench6 w;
  w << 0, 0, s.mass * kG, 0, 0, 0;
  const Eigen::VectorXd u = allocate(af, a.dimensioning, w);
  const double expected = 0.54 * kG / (16 * std::cos(kPi / 4));
  EXPECT_NEAR(expected, 0.4682, 1e-4);
  for (Eigen::Index i = 0; i < u.size(); ++i) EXPECT_NEAR(u(i), expected, 1e-9);
  EXPECT_LT((af * u - w).norm(), 1e-9);
}

TEST(Allocate, QuadrotorHoverDof4) {
  const StructureModel s = single_module(make_r_module(Mat3::Identity()));
  Wrench6 w;
  w << 0, 0, s.mass * kG, 0, 0, 0;
  const Eigen::VectorXd u = allocate(s.design, dimensioning_matrix(4), w);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(u(i), s.mass * kG / 4, 1e-12);
}

TEST(AllocateProperty, ExactForFullyActuated) {
  const StructureModel s = four_t_structure();
  const auto a = full(s);
  const DesignMatrix af = to_f_frame(s.design, a.f_frame);
  const Allocator alloc(af, a.dimensioning);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n;
  for (int i = 0; i < 1000; ++i) {
    Wrench6 w;
    for (int k = 0; k < 6; ++k) w(k) = n(rng);
    const Eigen::VectorXd u = alloc(w);
    EXPECT_LT((af * u - w).norm(), 1e-8 * w.norm());
    EXPECT_TRUE(u.isApprox(min_norm_solve(af, w), 1e-9));
  }
}

TEST(AllocateProperty, MinimumNorm) {
  const StructureModel s = four_t_structure();
  const auto a = full(s);
  const DesignMatrix af = to_f_frame(s.design, a.f_frame);
  const Eigen::MatrixXd da = a.dimensioning * af;
  const Eigen::MatrixXd basis = null_space(da);
  ASSERT_EQ(basis.cols(), 16 - 6);
  std::mt19937_64 rng(29);
  std::normal_distribution<double> n;
  for (int i = 0; i < 100; ++i) {
    Wrench6 w;
    for (int k = 0; k < 6; ++k) w(k) = n(rng);
    const Eigen::VectorXd u = allocate(af, a.dimensioning, w);
    for (int j = 0; j < 100; ++j) {
      Eigen::VectorXd c(basis.cols());
      for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = n(rng);
      const Eigen::VectorXd delta = basis * c;
      EXPECT_LT((da * delta).norm(), 1e-9 * delta.norm());
      EXPECT_LE(u.norm(), (u + delta).norm());
    }
  }
}

TEST(AllocateProperty, ReducedSystemExactForFiveDof) {
  const StructureModel s = two_r_structure();
  const auto a = full(s);
  const DesignMatrix af = to_f_frame(s.design, a.f_frame);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;
  for (int i = 0; i < 200; ++i) {
    Wrench6 w;
    for (int k = 0; k < 6; ++k) w(k) = n(rng);
    const Eigen::VectorXd u = allocate(af, a.dimensioning, w);
    EXPECT_LT((a.dimensioning * (af * u - w)).norm(), 1e-9 * w.norm());
  }
}

TEST(ToFFrame, RotatesBothBlocks) {
  const StructureModel s = single_module(make_r_module(ry(0.3)));
  const DesignMatrix af = to_f_frame(s.design, ry(0.3));
  EXPECT_TRUE(af.topRows<3>().isApprox(ry(0.3).transpose() * s.design.topRows<3>()));
  EXPECT_TRUE(af.bottomRows<3>().isApprox(ry(0.3).transpose() * s.design.bottomRows<3>()));
  for (int j = 0; j < 4; ++j) EXPECT_TRUE(af.col(j).head<3>().isApprox(Vec3::UnitZ(), 1e-14));
}

}  // namespace
}  // namespace modquad

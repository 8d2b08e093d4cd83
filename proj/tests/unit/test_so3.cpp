#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ornithopter/errors.hpp"
#include "ornithopter/so3.hpp"
#include "test_support.hpp"

namespace ornithopter::test {

constexpr double kPi = std::numbers::pi;

TEST(Hat, BasisCrossProduct) { EXPECT_LT((hat(kE1) * kE2 - kE3).norm(), 1e-15); }

TEST(Hat, MatrixLayout) {
  Mat3 expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  EXPECT_EQ(hat(Vec3(1, 2, 3)), expected);
}

TEST(Hat, PropertiesOnRandomVectors) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 a = random_vec(rng, 10.0), b = random_vec(rng, 10.0);
    const double s = std::uniform_real_distribution<double>(-3, 3)(rng);
    EXPECT_LT((hat(a) * a).norm(), 1e-12);
    EXPECT_LT((hat(a) * b - a.cross(b)).norm(), 1e-12);
    EXPECT_LT(max_abs(hat(s * a + b) - (s * hat(a) + hat(b))), 1e-12);
    EXPECT_LT((vee(hat(a)) - a).norm(), 1e-15);
    EXPECT_LT(max_abs(hat(a) + hat(a).transpose()), 1e-15);
  }
}

TEST(Sgn, ZeroMapsToZero) {
  EXPECT_EQ(sgn(0.0), 0.0);
  EXPECT_EQ(sgn(-0.0), 0.0);
  EXPECT_EQ(sgn(2.5), 1.0);
  EXPECT_EQ(sgn(-1e-300), -1.0);
}

TEST(ExpSo3, ZeroAngleIsIdentity) {
  EXPECT_EQ(exp_so3(kE3, 0.0).matrix(), Mat3::Identity());
}

TEST(ExpSo3, QuarterTurnAboutE3) {
  EXPECT_LT((exp_so3(kE3, kPi / 2) * kE1 - kE2).norm(), 1e-15);
}

TEST(ExpSo3, ZeroAxisThrows) { EXPECT_THROW(exp_so3(Vec3::Zero(), 0.3), ZeroAxis); }

TEST(ExpSo3, InversePairingAndGroupInvariants) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int k = 0; k < 10000; ++k) {
    Vec3 u = random_vec(rng);
    if (u.norm() < 1e-3) continue;
    const double th = angle(rng);
    const Rotation r = exp_so3(u, th);
    EXPECT_LT(r.orthonormality_error(), 1e-12);
    EXPECT_NEAR(r.matrix().determinant(), 1.0, 1e-12);
    EXPECT_LT(max_abs((r * exp_so3(u, -th)).matrix() - Mat3::Identity()), 1e-12);
  }
}

TEST(ExpSo3, RotationVectorMatchesAxisAngle) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    const Vec3 v = random_vec(rng, 3.0);
    EXPECT_LT(max_abs(exp_so3(v).matrix() - exp_so3(v.normalized(), v.norm()).matrix()), 1e-14);
  }
}

TEST(ExpSo3, AgreesWithEigenAngleAxis) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 100; ++k) {
    const Vec3 v = random_vec(rng, 3.0);
    const Mat3 oracle = Eigen::AngleAxisd(v.norm(), v.normalized()).toRotationMatrix();
    EXPECT_LT(max_abs(exp_so3(v).matrix() - oracle), 1e-14);
  }
}

TEST(Project, RemovesE2Component) {
  EXPECT_LT((project(kE2) * Vec3(1, 2, 3) - Vec3(1, 0, 3)).norm(), 1e-15);
}

TEST(Project, BasisCase) {
  EXPECT_EQ(project(kE1), Mat3(Vec3(0, 1, 1).asDiagonal()));
}

TEST(Project, IdempotentWithEigenvaluesZeroOneOne) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 z = random_vec(rng, 5.0);
    const Mat3 p = project(z);
    EXPECT_LT(max_abs(p * p - p), 1e-14);
    const Vec3 ev = Eigen::SelfAdjointEigenSolver<Mat3>(p).eigenvalues();
    EXPECT_NEAR(ev(0), 0.0, 1e-14);
    EXPECT_NEAR(ev(1), 1.0, 1e-14);
    EXPECT_NEAR(ev(2), 1.0, 1e-14);
  }
}

TEST(Project, ZeroVectorThrows) { EXPECT_THROW(project(Vec3(1e-13, 0, 0)), ZeroVector); }

TEST(Rotation, FromMatrixRepairsDrift) {
  Mat3 m = exp_so3(Vec3(0.3, -0.2, 0.9)).matrix();
  m(0, 0) += 1e-6;
  const Rotation r = Rotation::from_matrix(m);
  EXPECT_LT(r.orthonormality_error(), 1e-14);
  EXPECT_LT(max_abs(r.matrix() - m), 1e-5);
}

TEST(Rotation, FromMatrixRejectsReflection) {
  EXPECT_THROW(Rotation::from_matrix(Mat3(Vec3(1, 1, -1).asDiagonal())), std::invalid_argument);
}

TEST(DexpInv, InvertsTheRightTrivializedDifferential) {
  // d/ds exp(u + s w) = exp(u) hat(dexp_r(u) w); dexp_inv must undo dexp_r.
  std::mt19937_64 rng(17);
  for (int k = 0; k < 50; ++k) {
    const Vec3 u = random_vec(rng, 1.0), w = random_vec(rng, 1.0);
    const double h = 1e-6;
    const Mat3 d = (exp_so3(u + h * w).matrix() - exp_so3(u - h * w).matrix()) / (2 * h);
    const Vec3 body = vee(exp_so3(u).matrix().transpose() * d);
    EXPECT_LT((dexp_inv(u) * body - w).norm(), 1e-8);
  }
}

}  // namespace ornithopter::test

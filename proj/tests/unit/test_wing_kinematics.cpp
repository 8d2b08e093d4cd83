#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ornithopter/reduced_dynamics.hpp"
#include "ornithopter/wing_kinematics.hpp"
#include "test_support.hpp"

namespace ornithopter::test {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

WingWaveform random_waveform(std::mt19937_64& rng, int psi_n = 1) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  WingWaveform w;
  w.f = in(30, 45);
  w.phi_m = in(30, 60) * kDeg;
  w.phi_0 = in(-30, 30) * kDeg;
  w.phi_a = in(-180, 180) * kDeg;
  w.phi_K = in(0.05, 0.95);
  w.theta_m = in(1, 90) * kDeg;
  w.theta_0 = in(-90, 90) * kDeg;
  w.theta_a = in(-180, 180) * kDeg;
  w.theta_C = in(0.1, 5);
  w.psi_m = in(1, 20) * kDeg;
  w.psi_0 = in(5, 30) * kDeg;
  w.psi_a = in(-180, 180) * kDeg;
  w.psi_N = psi_n;
  w.beta = in(5, 30) * kDeg;
  return w;
}

}  // namespace

TEST(Waveform, FlappingPeakIndependentOfShape) {
  for (double k : {0.05, 0.5, 0.99}) {
    WingWaveform w = frozen_waveform();
    w.phi_m = 0.7;
    w.phi_0 = 0.1;
    w.phi_K = k;
    EXPECT_NEAR(angle_profiles(w, 0.0).phi.value, 0.8, 1e-14) << "phi_K = " << k;
  }
}

TEST(Waveform, HoverForeWingStartsAtPeak) {
  const WingWaveform w = dragonfly_hover_kinematics().wings[0];
  EXPECT_NEAR(angle_profiles(w, 0.0).phi.value / kDeg, 63.06, 1e-10);
}

TEST(Waveform, FigureEightDoublesDeviationFrequency) {
  WingWaveform one = frozen_waveform(), two = frozen_waveform();
  one.psi_m = two.psi_m = 0.2;
  two.psi_N = 2;
  const double period = 1.0 / one.f;
  for (int k = 0; k < 50; ++k) {
    const double t = period * k / 50.0;
    EXPECT_NEAR(angle_profiles(two, t).psi.value, angle_profiles(one, 2 * t).psi.value, 1e-14);
  }
}

TEST(Waveform, AngleBoundsHold) {
  std::mt19937_64 rng(51);
  for (int k = 0; k < 50; ++k) {
    const WingWaveform w = random_waveform(rng);
    for (int j = 0; j < 200; ++j) {
      const EulerAngles a = angle_profiles(w, j / (200.0 * w.f));
      EXPECT_LE(std::abs(a.phi.value - w.phi_0), w.phi_m * (1 + 1e-12));
      EXPECT_LE(std::abs(a.theta.value - w.theta_0), w.theta_m * (1 + 1e-12));
      EXPECT_LE(std::abs(a.psi.value - w.psi_0), w.psi_m * (1 + 1e-12));
    }
  }
}

TEST(Attitude, ZeroAnglesAreIdentity) {
  for (std::size_t i = 0; i < kWingCount; ++i) {
    EXPECT_EQ(wing_attitude_from_angles(0, 0, 0, 0, i).matrix(), Mat3::Identity());
  }
}

TEST(Attitude, PureFlapIsRotationAboutE1) {
  const Mat3 a = wing_attitude_from_angles(0.0, kPi / 2, 0.0, 0.0, 0).matrix();
  EXPECT_LT(max_abs(a - exp_so3(kE1, kPi / 2).matrix()), 1e-15);
}

TEST(Attitude, LeftWingIsMirrorOfRightWing) {
  const Mat3 mirror = Vec3(1, -1, 1).asDiagonal();
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 200; ++k) {
    const double beta = u(rng), phi = u(rng), theta = u(rng), psi = u(rng);
    const Mat3 a1 = wing_attitude_from_angles(beta, phi, theta, psi, 0).matrix();
    const Mat3 a2 = wing_attitude_from_angles(beta, phi, theta, psi, 1).matrix();
    EXPECT_LT(max_abs(mirror * a1 * mirror - a2), 1e-14);
  }
}

TEST(Attitude, ExtractAnglesRoundTrip) {
  std::mt19937_64 rng(57);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int k = 0; k < 200; ++k) {
    const std::size_t i = static_cast<std::size_t>(k) % kWingCount;
    const double beta = u(rng), phi = u(rng), theta = u(rng), psi = u(rng);
    const AnglesOnly a =
        extract_angles(wing_attitude_from_angles(beta, phi, theta, psi, i).matrix(), beta, i);
    EXPECT_NEAR(a.phi, phi, 1e-12);
    EXPECT_NEAR(a.theta, theta, 1e-12);
    EXPECT_NEAR(a.psi, psi, 1e-12);
  }
}

TEST(AngularVelocity, StaticWing) {
  const WingWaveform w = frozen_waveform();
  for (std::size_t i = 0; i < kWingCount; ++i) {
    EXPECT_EQ(wing_angular_velocity(w, i, 0.01).norm(), 0.0);
    EXPECT_EQ(wing_angular_acceleration(w, i, 0.01).norm(), 0.0);
  }
}

TEST(AngularVelocity, FirstJacobianColumnAtZeroAngles) {
  EXPECT_LT((euler_rate_jacobian(0.0, 0.0, 0) * kE1 - kE1).norm(), 1e-15);
}

TEST(AngularVelocity, FrozenJacobianGivesNoAcceleration) {
  // psi = theta = 0 with only a linear-in-time flap: no Jacobian rate, no flap acceleration.
  const Mat3 j = euler_rate_jacobian(0.0, 0.0, 0);
  const Vec3 rates(2.0, 0.0, 0.0);
  const Mat3 jdot = Mat3::Zero();
  EXPECT_EQ((jdot * rates + j * Vec3::Zero()).norm(), 0.0);
  WingWaveform w = frozen_waveform(0.3, 0.0, 0.0, 0.0);
  EXPECT_EQ(wing_angular_acceleration(w, 0, 0.123).norm(), 0.0);
}

TEST(AngularVelocity, MatchesCentralDifferenceAtSecondOrder) {
  std::mt19937_64 rng(59);
  for (int k = 0; k < 20; ++k) {
    const WingWaveform w = random_waveform(rng, 1 + k % 2);
    const std::size_t i = static_cast<std::size_t>(k) % kWingCount;
    const double t = std::uniform_real_distribution<double>(0.0, 1.0 / w.f)(rng);
    const Mat3 a = wing_attitude(w, i, t).matrix();
    double err[2];
    double err_acc[2];
    for (int level = 0; level < 2; ++level) {
      const double h = level == 0 ? 2e-4 : 1e-4;
      const Mat3 a_dot = (wing_attitude(w, i, t + h).matrix() - wing_attitude(w, i, t - h).matrix()) / (2 * h);
      err[level] = (hat(wing_angular_velocity(w, i, t)) - a.transpose() * a_dot).norm();
      const Vec3 fd = (wing_angular_velocity(w, i, t + h) - wing_angular_velocity(w, i, t - h)) / (2 * h);
      err_acc[level] = (wing_angular_acceleration(w, i, t) - fd).norm();
    }
    EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.15);
    EXPECT_NEAR(std::log2(err_acc[0] / err_acc[1]), 2.0, 0.15);
  }
}

TEST(AngularVelocity, FiniteDifferenceFallbackAgrees) {
  const KinematicsParams k = dragonfly_hover_kinematics();
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const WingStateSample a = sample_wing(k.wings[i], i, 0.0071);
    const WingStateSample b = sample_wing_fd(k.wings[i], i, 0.0071, 1e-5);
    EXPECT_LT((a.rate - b.rate).norm(), 1e-5 * a.rate.norm());
    EXPECT_LT((a.rate_dot - b.rate_dot).norm(), 1e-4 * a.rate_dot.norm());
  }
}

TEST(Periodicity, AttitudeRepeatsEachPeriod) {
  std::mt19937_64 rng(61);
  for (int psi_n : {1, 2}) {
    const WingWaveform w = random_waveform(rng, psi_n);
    for (int k = 0; k < 20; ++k) {
      const double t = k * 0.0013;
      EXPECT_LT(max_abs(wing_attitude(w, 2, t + 1.0 / w.f).matrix() - wing_attitude(w, 2, t).matrix()),
                1e-12);
    }
  }
}

TEST(Periodicity, IntegratedRateReproducesClosedForm) {
  // RK4 on the group with the analytic Omega over one period.
  const WingWaveform w = dragonfly_hover_kinematics().wings[2];
  const std::size_t i = 2;
  const int steps = 20000;
  const double period = 1.0 / w.f, dt = period / steps;
  Mat3 a = wing_attitude(w, i, 0.0).matrix();
  for (int n = 0; n < steps; ++n) {
    const double t = n * dt;
    const Vec3 k1 = wing_angular_velocity(w, i, t);
    const Vec3 k2 = wing_angular_velocity(w, i, t + 0.5 * dt);
    const Vec3 k4 = wing_angular_velocity(w, i, t + dt);
    // Fourth-order Magnus expansion with the commutator correction.
    const Vec3 omega = dt / 6.0 * (k1 + 4.0 * k2 + k4) + dt * dt / 12.0 * k1.cross(k4);
    a = a * exp_so3(omega).matrix();
  }
  EXPECT_LT(max_abs(a - wing_attitude(w, i, period).matrix()), 1e-6);
}

TEST(Bounds, HoverKinematicsAreInRange) {
  const KinematicsParams k = dragonfly_hover_kinematics();
  for (const auto& w : k.wings) EXPECT_TRUE(check_bounds(w).empty());
}

TEST(Bounds, FlapAmplitudeAboveRangeIsReported) {
  WingWaveform w = dragonfly_hover_kinematics().wings[0];
  w.phi_m = 90.0 * kDeg;
  const auto v = check_bounds(w);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].parameter, "phi_m");
  EXPECT_NE(v[0].message.find("exceeds"), std::string::npos);
  EXPECT_NE(v[0].message.find("[30"), std::string::npos);
}

TEST(Waveform, ValidateRejectsBadShapeParameters) {
  WingWaveform w = frozen_waveform();
  w.phi_K = 1.5;
  EXPECT_THROW(w.validate(), std::invalid_argument);
  w = frozen_waveform();
  w.psi_N = 3;
  EXPECT_THROW(w.validate(), std::invalid_argument);
}

}  // namespace ornithopter::test

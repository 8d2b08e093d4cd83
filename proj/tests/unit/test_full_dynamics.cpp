#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ornithopter/errors.hpp"
#include "ornithopter/full_dynamics.hpp"
#include "test_support.hpp"

namespace ornithopter::test {

namespace {

// Kinetic energy from first principles: each body's CoM velocity and its
// absolute angular velocity.
double kinetic_energy_oracle(const SystemState& s, const Morphology& m) {
  const Mat3 ab = s.body_attitude.matrix();
  double t = 0.5 * m.body_mass * s.velocity.squaredNorm() +
             0.5 * s.body_rate.dot(m.body_inertia * s.body_rate);
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const WingBody& w = m.wings[i];
    const Mat3 ai = s.wing_attitudes[i].matrix();
    const Vec3 lever = w.joint_offset + ai * w.com_offset;
    const Vec3 v_com =
        s.velocity + ab * (s.body_rate.cross(lever) + ai * s.wing_rates[i].cross(w.com_offset));
    const Vec3 omega = ai.transpose() * s.body_rate + s.wing_rates[i];
    const Mat3 j_com = w.inertia + w.mass * hat(w.com_offset) * hat(w.com_offset);
    t += 0.5 * w.mass * v_com.squaredNorm() + 0.5 * omega.dot(j_com * omega);
  }
  return t;
}

Vehicle vacuum_vehicle() { return Vehicle(vacuum_morphology(), no_air()); }

Vehicle zero_g_vacuum_vehicle() {
  Morphology m = vacuum_morphology();
  m.gravity = 0.0;
  return Vehicle(m, no_air());
}

SystemState at_rest(const Vec3& p = Vec3(0, 0, 2)) {
  SystemState s;
  s.position = p;
  const KinematicsParams k = dragonfly_hover_kinematics();
  for (std::size_t i = 0; i < kWingCount; ++i) s.wing_attitudes[i] = wing_attitude(k.wings[i], i, 0.0);
  return s;
}

const TorqueLaw kNoTorque = [](const SystemState&) { return zero_torques(); };

}  // namespace

TEST(MassMatrix, KineticEnergyMatchesPerBodyOracle) {
  const Morphology m = vacuum_morphology();
  std::mt19937_64 rng(71);
  for (int k = 0; k < 200; ++k) {
    const SystemState s = random_state(rng);
    const Vec18 xi = s.xi();
    const double oracle = kinetic_energy_oracle(s, m);
    EXPECT_NEAR(0.5 * xi.dot(assemble_C(s, m) * xi), oracle, 1e-12 * oracle);
  }
}

TEST(MassMatrix, SymmetricPositiveDefinite) {
  const Morphology m = vacuum_morphology();
  std::mt19937_64 rng(73);
  for (int k = 0; k < 100; ++k) {
    const Mat18 c = assemble_C(random_state(rng), m);
    EXPECT_LT(max_abs(c - c.transpose()), 1e-15 * max_abs(c));
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat18>(c).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(MassMatrix, TranslationalBlockIsTotalMass) {
  const Morphology m = vacuum_morphology();
  std::mt19937_64 rng(79);
  const Mat18 c = assemble_C(random_state(rng), m);
  EXPECT_LT(max_abs(c.block<3, 3>(0, 0) - m.total_mass() * Mat3::Identity()), 1e-18);
}

TEST(MassMatrix, BlocksSumToC) {
  const Morphology m = vacuum_morphology();
  std::mt19937_64 rng(83);
  const SystemState s = random_state(rng);
  Mat18 sum = Mat18::Zero();
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const Mat9 b = mass_block(s, m, i);
    const Eigen::Index w = wing_block(i);
    sum.block<6, 6>(0, 0) += b.block<6, 6>(0, 0);
    sum.block<6, 3>(0, w) += b.block<6, 3>(0, 6);
    sum.block<3, 6>(w, 0) += b.block<3, 6>(6, 0);
    sum.block<3, 3>(w, w) += b.block<3, 3>(6, 6);
  }
  EXPECT_LT(max_abs(sum - assemble_C(s, m)), 1e-14 * max_abs(sum));
}

TEST(MassMatrix, InvariantUnderInertialRotation) {
  const Morphology m = vacuum_morphology();
  std::mt19937_64 rng(89);
  for (int k = 0; k < 20; ++k) {
    SystemState s = random_state(rng);
    const double t0 = 0.5 * s.xi().dot(assemble_C(s, m) * s.xi());
    const Rotation r = random_rotation(rng);
    s.body_attitude = r * s.body_attitude;
    s.velocity = r.matrix() * s.velocity;
    s.position = r.matrix() * s.position;
    EXPECT_NEAR(0.5 * s.xi().dot(assemble_C(s, m) * s.xi()), t0, 1e-12 * t0);
  }
}

TEST(Coriolis, VanishesAtRest) {
  const Morphology m = vacuum_morphology();
  std::mt19937_64 rng(97);
  SystemState s = random_state(rng);
  s.set_xi(Vec18::Zero());
  EXPECT_EQ(assemble_D(s, m).norm(), 0.0);
  EXPECT_EQ(coriolis_vector(s, m).norm(), 0.0);
}

TEST(Coriolis, MatrixTimesXiMatchesVector) {
  const Morphology m = vacuum_morphology();
  std::mt19937_64 rng(101);
  for (int k = 0; k < 50; ++k) {
    const SystemState s = random_state(rng);
    const Vec18 direct = coriolis_vector(s, m);
    EXPECT_LT((assemble_D(s, m) * s.xi() - direct).norm(), 1e-12 * direct.norm());
  }
}

TEST(Gravity, TranslationalBlockPointsAlongE3) {
  const Morphology m = vacuum_morphology();
  std::mt19937_64 rng(107);
  const Vec18 f = gravity_forces(random_state(rng), m);
  EXPECT_LT((f.segment<3>(0) - m.total_mass() * m.gravity * kE3).norm(), 1e-18);
}

TEST(Gravity, MatchesGradientOfPotential) {
  const Morphology m = vacuum_morphology();
  std::mt19937_64 rng(109);
  const SystemState s = random_state(rng);
  const Vec18 f = gravity_forces(s, m);
  const double h = 1e-6;
  for (Eigen::Index k = 0; k < 18; ++k) {
    SystemState plus = s, minus = s;
    if (k < 3) {
      plus.position(k) += h;
      minus.position(k) -= h;
    } else {
      const Eigen::Index blk = k / 3 - 1;
      const Vec3 e = Vec3::Unit(k % 3);
      Rotation& rp = blk == 0 ? plus.body_attitude : plus.wing_attitudes[blk - 1];
      Rotation& rm = blk == 0 ? minus.body_attitude : minus.wing_attitudes[blk - 1];
      rp = rp * exp_so3(h * e);
      rm = rm * exp_so3(-h * e);
    }
    const double grad = (potential_energy(plus, m) - potential_energy(minus, m)) / (2 * h);
    EXPECT_NEAR(f(k), -grad, 1e-9 * m.total_mass() * m.gravity) << "component " << k;
  }
}

TEST(Gravity, PotentialShiftsWithAltitude) {
  const Morphology m = vacuum_morphology();
  const SystemState a = at_rest(Vec3(0, 0, 2)), b = at_rest(Vec3(0.3, -1.0, 2.5));
  EXPECT_NEAR(potential_energy(b, m) - potential_energy(a, m), -m.total_mass() * m.gravity * 0.5,
              1e-15);
}

TEST(ControlForces, Structure) {
  std::mt19937_64 rng(113);
  const SystemState s = random_state(rng);
  Torques tau;
  for (auto& t : tau) t = random_vec(rng);
  const Vec18 h = control_forces(s, tau);
  EXPECT_EQ(h.segment<3>(0).norm(), 0.0);
  EXPECT_LT((h.segment<3>(3) + tau[0] + tau[1] + tau[2] + tau[3]).norm(), 1e-15);
  for (std::size_t i = 0; i < kWingCount; ++i) {
    EXPECT_LT((h.segment<3>(wing_block(i)) - s.wing_attitudes[i].matrix().transpose() * tau[i]).norm(),
              1e-15);
  }
}

TEST(AeroForces, RotatesWingForcesIntoTheInertialFrame) {
  const Morphology m = vacuum_morphology();
  std::mt19937_64 rng(127);
  const SystemState s = random_state(rng);
  WingWrenches w;
  Vec3 total = Vec3::Zero(), moment = Vec3::Zero();
  for (std::size_t i = 0; i < kWingCount; ++i) {
    w[i].lift = random_vec(rng);
    w[i].drag = random_vec(rng);
    w[i].moment = random_vec(rng);
    const Vec3 body_frame = s.wing_attitudes[i].matrix() * w[i].force();
    total += s.body_attitude.matrix() * body_frame;
    moment += m.wings[i].joint_offset.cross(body_frame);
  }
  const Vec18 f = aero_forces(s, m, w);
  EXPECT_LT((f.segment<3>(0) - total).norm(), 1e-14);
  EXPECT_LT((f.segment<3>(3) - moment).norm(), 1e-14);
  for (std::size_t i = 0; i < kWingCount; ++i) EXPECT_EQ(f.segment<3>(wing_block(i)), w[i].moment);
}

TEST(MassSolve, AgreesWithFullPivotLu) {
  const Morphology m = vacuum_morphology();
  std::mt19937_64 rng(131);
  for (int k = 0; k < 50; ++k) {
    const Mat18 c = assemble_C(random_state(rng), m);
    Vec18 b;
    for (Eigen::Index j = 0; j < 18; ++j) b(j) = random_vec(rng)(0) * 1e-4;
    const Vec18 oracle = c.fullPivLu().solve(b);
    EXPECT_LT((solve_mass_system(c, b) - oracle).norm(), 1e-8 * oracle.norm());
  }
}

TEST(MassSolve, AccelerationMatchesDenseLuOracle) {
  const Vehicle v(vacuum_morphology(), AeroModel{});
  std::mt19937_64 rng(133);
  for (int k = 0; k < 20; ++k) {
    const SystemState s = random_state(rng);
    Torques tau;
    for (auto& t : tau) t = random_vec(rng, 1e-5);
    const EomTerms e = eom_terms(v, s);
    const Vec18 b = e.aero + control_forces(s, tau) + e.gravity - e.coriolis;
    const Vec18 oracle = Eigen::MatrixXd(e.mass).partialPivLu().solve(Eigen::VectorXd(b));
    const Vec18 a = eom_rhs(v, s, tau);
    EXPECT_LT((a - oracle).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, oracle.cwiseAbs().maxCoeff()));
  }
}

TEST(MassSolve, SingularMatrixThrows) {
  Mat18 c = Mat18::Identity();
  c(5, 5) = -1.0;
  EXPECT_THROW(solve_mass_system(c, Vec18::Ones()), SingularMass);
}

TEST(Integrator, FreeFallFromRest) {
  const Vehicle v = vacuum_vehicle();
  SystemState s = at_rest();
  const Vec18 a = eom_rhs(v, s, zero_torques());
  EXPECT_LT((a.segment<3>(0) - v.morphology().gravity * kE3).norm(), 1e-13);
  EXPECT_LT(a.segment<15>(3).norm(), 1e-9);
  const double dt = 1e-4;
  for (int n = 0; n < 100; ++n) s = step(v, s, kNoTorque, dt);
  const double t = 100 * dt;
  const Vec3 expected = Vec3(0, 0, 2) + 0.5 * v.morphology().gravity * t * t * kE3;
  EXPECT_LT((s.position - expected).norm(), 1e-12);
  EXPECT_NEAR(s.t, t, 1e-15);
}

TEST(Integrator, FourthOrderConvergence) {
  const Vehicle v = vacuum_vehicle();
  std::mt19937_64 rng(137);
  RandomStateRanges r;
  r.wing_rate = 100.0;
  r.body_rate = 20.0;
  const SystemState s0 = random_state(rng, r);
  const double horizon = 2e-3;
  const auto run = [&](int n) {
    SystemState s = s0;
    for (int k = 0; k < n; ++k) s = step(v, s, kNoTorque, horizon / n);
    return s;
  };
  const SystemState ref = run(512);
  const auto err = [&](const SystemState& s) {
    double e = (s.position - ref.position).norm() * 1e3 + (s.xi() - ref.xi()).norm() * 1e-2;
    for (std::size_t i = 0; i < kWingCount; ++i) {
      e += max_abs(s.wing_attitudes[i].matrix() - ref.wing_attitudes[i].matrix());
    }
    return e;
  };
  const double e1 = err(run(16)), e2 = err(run(32));
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.4);
}

TEST(Integrator, AttitudesStayOnSo3) {
  const Vehicle v = zero_g_vacuum_vehicle();
  std::mt19937_64 rng(139);
  SystemState s = random_state(rng);
  for (int n = 0; n < 200; ++n) s = step(v, s, kNoTorque, 1e-5);
  EXPECT_LT(s.body_attitude.orthonormality_error(), 1e-12);
  for (const auto& a : s.wing_attitudes) EXPECT_LT(a.orthonormality_error(), 1e-12);
}

TEST(Integrator, ConservesMomentumAndEnergyWithoutExternalForces) {
  const Vehicle v = zero_g_vacuum_vehicle();
  std::mt19937_64 rng(149);
  RandomStateRanges r;
  r.wing_rate = 100.0;
  SystemState s = random_state(rng, r);
  const Diagnostics d0 = diagnostics(s, v.morphology());
  for (int n = 0; n < 500; ++n) s = step(v, s, kNoTorque, 2e-6);
  const Diagnostics d1 = diagnostics(s, v.morphology());
  EXPECT_LT((d1.linear_momentum - d0.linear_momentum).norm(), 1e-10 * d0.linear_momentum.norm());
  EXPECT_NEAR(d1.total, d0.total, 1e-8 * d0.kinetic);
}

TEST(Integrator, EnergyConservedUnderGravity) {
  const Vehicle v = vacuum_vehicle();
  std::mt19937_64 rng(151);
  RandomStateRanges r;
  r.wing_rate = 100.0;
  SystemState s = random_state(rng, r);
  const double e0 = diagnostics(s, v.morphology()).total;
  const double t0 = diagnostics(s, v.morphology()).kinetic;
  for (int n = 0; n < 500; ++n) s = step(v, s, kNoTorque, 2e-6);
  EXPECT_NEAR(diagnostics(s, v.morphology()).total, e0, 1e-8 * t0);
}

TEST(Integrator, NonFiniteTorqueIsANumericalError) {
  const Vehicle v = vacuum_vehicle();
  const TorqueLaw bad = [](const SystemState&) {
    Torques t = zero_torques();
    t[0] = Vec3(std::nan(""), 0, 0);
    return t;
  };
  EXPECT_THROW(step(v, at_rest(), bad, 1e-5), NumericalError);
}

}  // namespace ornithopter::test

#pragma once

#include <array>
#include <functional>
#include <vector>

#include "ornithopter/aerodynamics.hpp"
#include "ornithopter/full_dynamics.hpp"
#include "ornithopter/state.hpp"
#include "ornithopter/wing_kinematics.hpp"

namespace ornithopter {

// Prescribed wing motion for all four wings.
struct KinematicsParams {
  std::array<WingWaveform, kWingCount> wings;
  // Replace the closed-form rates by central differences of the attitude.
  bool finite_difference = false;
  double fd_step = 1e-6;  // s

  double frequency() const { return wings[0].f; }
};

// Body pitch Phi_B(t) = amplitude cos(2 pi f t + phase) + offset about e2 (rad).
struct BodyPitch {
  double amplitude = 0.0;
  double phase = 0.0;
  double offset = 0.0;
};

struct PitchSample {
  double angle = 0.0;
  Rotation attitude;
  Vec3 rate = Vec3::Zero();      // Omega_B, body frame
  Vec3 rate_dot = Vec3::Zero();  // Omega_B dot
};

PitchSample body_pitch(const BodyPitch& pitch, double f, double t);

// Hovering kinematics of the dragonfly: fore wings share one column of
// parameters and hind wings the other; f = 35.6476 Hz.
KinematicsParams dragonfly_hover_kinematics();
BodyPitch dragonfly_hover_pitch();

using WingSamples = std::array<WingStateSample, kWingCount>;
WingSamples sample_wings(const KinematicsParams& params, double t);

// Full state from a body state and the prescribed wings at body.t.
SystemState compose_state(const BodyState& body, const WingSamples& wings);
BodyState body_part(const SystemState& state);

using Mat6x12 = Eigen::Matrix<double, 6, 12>;
using Mat12x6 = Eigen::Matrix<double, 12, 6>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

// Body / wing partition of the full equations at a body state and the
// prescribed wing motion. Index 1 is (p_dot, Omega_B), index 2 the wings.
struct ReducedTerms {
  SystemState state;
  Vec12 wing_rate_dot = Vec12::Zero();  // xi_w dot
  Mat6 c11;
  Mat6x12 c12;
  Mat12x6 c21;
  Mat12 c22;
  Vec6 coriolis1, aero1, gravity1;
  Vec12 coriolis2, aero2, gravity2;
  Mat6x12 k;  // F_u1 = K F_u2
  WingWrenches wrenches;
};

// Same elimination at an arbitrary full state with imposed wing
// accelerations (inverse dynamics of the full model).
ReducedTerms reduced_terms(const Vehicle& vehicle, const SystemState& state,
                           const Vec12& wing_rate_dot);
ReducedTerms reduced_terms(const Vehicle& vehicle, const BodyState& body,
                           const KinematicsParams& params);

// Solves (C11 - K C21) xi_B dot = F_a1 + F_g1 - d_1 - C12 xi_w dot
//                                + K (C22 xi_w dot + d_2 - F_a2 - F_g2).
// Throws SingularReducedMass.
Vec6 solve_reduced(const ReducedTerms& terms);
Vec6 reduced_rhs(const Vehicle& vehicle, const BodyState& body, const KinematicsParams& params);

// Joint torques (body frame) that realize the prescribed wing motion while
// the body accelerates with xi_B dot.
Torques recover_torques(const ReducedTerms& terms, const Vec6& body_accel);
Torques recover_torques(const Vehicle& vehicle, const BodyState& body, const Vec6& body_accel,
                        const KinematicsParams& params);

struct TrackingGains {
  double natural_frequency = 2000.0;  // rad/s
  double damping = 1.0;
};

// Torque law for the full model. Torques are recovered at the model's own
// state with imposed wing accelerations
//   A_i^T A_i^d Omega_i^d dot - Omega_i x (A_i^T A_i^d Omega_i^d) - k_p e_R - k_d e_Omega,
// e_R = vee(A_i^dT A_i - A_i^T A_i^d) / 2, e_Omega = Omega_i - A_i^T A_i^d Omega_i^d,
// which equal the prescribed accelerations on the prescribed wing motion, so
// there the law reduces to recover_torques. `vehicle` must outlive the law.
TorqueLaw tracking_torque_law(const Vehicle& vehicle, const KinematicsParams& params,
                              const TrackingGains& gains = {});

// Runge-Kutta-Munthe-Kaas step of the reduced body dynamics.
BodyState step_reduced(const Vehicle& vehicle, const BodyState& body,
                       const KinematicsParams& params, double dt);

// Residuals of the closed-form reduced equation against block elimination.
struct ReducedCrossCheck {
  double mass_mismatch = 0.0;       // |C_closed - (C11 - K C21)| / |C11 - K C21|
  double derived_mismatch = 0.0;    // closed form with N = D - S C
  double reference_mismatch = 0.0;  // closed form with the reference N blocks
};

ReducedCrossCheck reduced_cross_check(const Vehicle& vehicle, const BodyState& body,
                                      const KinematicsParams& params);

// Forces in the inertial frame, torques in the body frame.
struct ForceDecomposition {
  Vec3 f_c = Vec3::Zero(), f_b = Vec3::Zero(), f_w = Vec3::Zero();
  Vec3 gamma_c = Vec3::Zero(), gamma_b = Vec3::Zero(), gamma_w = Vec3::Zero();
};

// Splits the body equations into aerodynamic, body-motion and wing-motion
// parts:  m v_dot = m g e3 + F_c + F_B + F_w  and
//         J_B Omega_B_dot = -Omega_B^ J_B Omega_B + Gamma_c + Gamma_B + Gamma_w.
// body_accel holds (v_dot, Omega_B_dot).
ForceDecomposition decompose_forces(const Morphology& morph, const SystemState& state,
                                    const WingWrenches& wrenches, const Vec6& body_accel,
                                    const std::array<Vec3, kWingCount>& wing_rate_dot);

// Decomposition along the reduced model: solves for xi_B dot first.
ForceDecomposition decompose_forces(const Vehicle& vehicle, const BodyState& body,
                                    const KinematicsParams& params, Vec6* body_accel = nullptr);

struct ClosureResidual {
  double translational = 0.0;  // |m v_dot - (m g e3 + F_c + F_B + F_w)| / max(1, m |v_dot|)
  double rotational = 0.0;     // same for J_B Omega_B_dot, scaled by max(1, |J_B Omega_B_dot|)
};

ClosureResidual closure_residual(const Morphology& morph, const BodyState& body,
                                 const ForceDecomposition& forces, const Vec6& body_accel);

// Translational acceleration when the body attitude follows the prescribed pitch.
Vec3 prescribed_acceleration(const Vehicle& vehicle, const KinematicsParams& params,
                             const BodyPitch& pitch, double t, const Vec3& p, const Vec3& v,
                             ForceDecomposition* forces = nullptr);

struct PrescribedSample {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double pitch = 0.0;
  ForceDecomposition forces;
};

struct PrescribedRun {
  std::vector<PrescribedSample> samples;
  bool diverged = false;
  double diverged_at = 0.0;
};

using PrescribedVisitor = std::function<void(double t, const Vec3& p, const Vec3& v)>;

// RK4 on (p, v) with the body pitch prescribed. Calls visit at the initial
// point and after every step. Returns false, with *diverged_at set, once the
// state is non-finite or farther than 1e6 m from the origin.
bool integrate_prescribed(const Vehicle& vehicle, const KinematicsParams& params,
                          const BodyPitch& pitch, const Vec3& p0, const Vec3& v0,
                          double duration, double dt, const PrescribedVisitor& visit,
                          double* diverged_at = nullptr);

// integrate_prescribed with one sample (including the force decomposition)
// every `stride` steps plus the initial and final points.
PrescribedRun prescribed_body_sim(const Vehicle& vehicle, const KinematicsParams& params,
                                  const BodyPitch& pitch, const Vec3& p0, const Vec3& v0,
                                  double duration, double dt, int stride = 1);

}  // namespace ornithopter

#pragma once

#include <functional>

#include "ornithopter/aerodynamics.hpp"
#include "ornithopter/morphology.hpp"
#include "ornithopter/state.hpp"

namespace ornithopter {

using Mat9 = Eigen::Matrix<double, 9, 9>;

// Kinetic-energy block of wing i over (p_dot, Omega_B, Omega_i); includes a
// quarter of the main-body mass and inertia so that the blocks sum to C.
Mat9 mass_block(const SystemState& state, const Morphology& morph, std::size_t wing);

// 18x18 mass matrix C(g); T = xi^T C xi / 2.
Mat18 assemble_C(const SystemState& state, const Morphology& morph);

// S(xi) = diag(0, Omega_B^, Omega_1^, ..., Omega_4^).
Mat18 assemble_S(const SystemState& state);

// D(g, xi) with D(g, xi) xi equal to the velocity-quadratic terms of the
// equations of motion. Every block is linear in xi.
Mat18 assemble_D(const SystemState& state, const Morphology& morph);

// N = D - S C for the D above.
Mat18 coupling_blocks(const SystemState& state, const Morphology& morph);

// The coupling blocks N_11 .. N_j(k+2) written out term by term in their
// published closed form. Kept for cross-checking against coupling_blocks:
// the translational row agrees (as a product with xi), the remaining rows
// carry transcription errors and do not conserve energy.
Mat18 reference_coupling_blocks(const SystemState& state, const Morphology& morph);

// D(g, xi) xi evaluated directly without forming D.
Vec18 coriolis_vector(const SystemState& state, const Morphology& morph);

// Generalized gravity force, equal to minus the left-trivialized gradient
// of U. Gravity acts along +e3.
Vec18 gravity_forces(const SystemState& state, const Morphology& morph);

// (sum A_B A_i F_i, sum mu_i^ A_i F_i, M_1, ..., M_4)
Vec18 aero_forces(const SystemState& state, const Morphology& morph,
                  const WingWrenches& wrenches);

// H_c tau = (0, -sum tau_i, A_1^T tau_1, ..., A_4^T tau_4); tau_i in the body frame.
Vec18 control_forces(const SystemState& state, const Torques& torques);

// Solves C x = b for symmetric positive-definite C using symmetric diagonal
// scaling, Cholesky and one step of iterative refinement.
// Throws SingularMass when the factorization fails.
Vec18 solve_mass_system(const Mat18& c, const Vec18& b);

struct EomTerms {
  Mat18 mass;
  Vec18 coriolis;
  Vec18 aero;
  Vec18 gravity;
  WingWrenches wrenches;
};

EomTerms eom_terms(const Vehicle& vehicle, const SystemState& state);

// xi_dot from C xi_dot + D xi = F_a + H_c tau + F_g.
Vec18 eom_rhs(const Vehicle& vehicle, const SystemState& state, const Torques& torques);

using TorqueLaw = std::function<Torques(const SystemState&)>;

Torques zero_torques();

// One Runge-Kutta-Munthe-Kaas step of order four. Attitudes are advanced by
// exponentials so they stay on SO(3). Throws NonFiniteState.
SystemState step(const Vehicle& vehicle, const SystemState& state, const TorqueLaw& torque,
                 double dt);

struct Diagnostics {
  double kinetic = 0.0;
  double potential = 0.0;
  double total = 0.0;
  Vec3 linear_momentum = Vec3::Zero();  // inertial frame
};

// U = -sum over all bodies of m g e3^T (CoM position).
double potential_energy(const SystemState& state, const Morphology& morph);
Diagnostics diagnostics(const SystemState& state, const Morphology& morph);

}  // namespace ornithopter

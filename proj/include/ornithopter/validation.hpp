#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ornithopter/config.hpp"
#include "ornithopter/full_dynamics.hpp"
#include "ornithopter/reduced_dynamics.hpp"

namespace ornithopter {

enum class CheckStatus { Pass, Warn, Fail };
std::string to_string(CheckStatus status);

struct CheckResult {
  std::string id;     // short key, e.g. "energy"
  std::string name;   // one-line description
  double measured = 0.0;
  double threshold = 0.0;
  CheckStatus status = CheckStatus::Fail;
  bool gating = true;  // non-gating checks never fail the report
  double runtime = 0.0;  // s
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  std::string text() const;  // aligned table
  std::string csv() const;
};

// Sizes of the individual checks. The defaults are the acceptance sizes;
// quick() shrinks every run for smoke testing.
struct ValidationOptions {
  std::uint64_t seed = 1;
  int mass_matrix_samples = 1000;
  int lemma_samples = 32;
  int variational_samples = 16;
  double energy_duration = 0.1;
  double energy_dt = 1e-6;
  int free_fall_steps = 10000;
  double free_fall_dt = 1e-5;
  double momentum_duration = 0.05;
  double momentum_dt = 1e-6;
  int kinematics_samples = 64;
  int quadrature_states = 20;
  double equivalence_periods = 1.0;
  double equivalence_dt = 1e-6;
  double closure_periods = 10.0;
  double closure_dt = 1e-5;
  double hover_periods = 10.0;
  double hover_dt = 1e-5;
  int ga_generations = 200;

  static ValidationOptions quick();
};

// Sampling ranges for random states: rotations from a uniform axis and an
// angle uniform on [0, pi]; velocities componentwise uniform.
struct RandomStateRanges {
  double velocity = 5.0;    // m/s
  double body_rate = 50.0;  // rad/s
  double wing_rate = 500.0; // rad/s
  double position = 1.0;    // m
};

Rotation random_rotation(std::mt19937_64& rng);
SystemState random_state(std::mt19937_64& rng, const RandomStateRanges& ranges = {});

// Kinetic energy summed body by body (CoM velocity and CoM inertia of each
// wing), independent of the assembled mass matrix.
double kinetic_energy_bodies(const SystemState& state, const Morphology& morph);

// Individual checks. `morph` and `aero` come from the run config; each check
// builds the variant it needs (vacuum, zero gravity, ...).
CheckResult check_mass_ratio(const Morphology& morph);
CheckResult check_energy(const Morphology& morph, const KinematicsParams& kin,
                         const ValidationOptions& opt);
CheckResult check_free_fall(const Morphology& morph, const KinematicsParams& kin,
                            const ValidationOptions& opt);
CheckResult check_momentum(const Morphology& morph, const ValidationOptions& opt);
CheckResult check_mass_matrix(const Morphology& morph, const ValidationOptions& opt);
CheckResult check_kinematics(const KinematicsParams& kin, const ValidationOptions& opt);
CheckResult check_quadrature(const Morphology& morph, const AeroModel& aero,
                             const KinematicsParams& kin, const ValidationOptions& opt);
CheckResult check_equivalence(const Morphology& morph, const AeroModel& aero,
                              const KinematicsParams& kin, const ValidationOptions& opt);
// Non-gating: the same comparison with the torques recovered along the
// reduced trajectory fed to the full model without wing feedback.
CheckResult check_equivalence_open_loop(const Morphology& morph, const AeroModel& aero,
                                        const KinematicsParams& kin, const ValidationOptions& opt);
// Returns the gated closure check; `scaled` receives the residual normalized by
// the sum of term magnitudes.
CheckResult check_closure(const Morphology& morph, const AeroModel& aero,
                          const KinematicsParams& kin, const ValidationOptions& opt,
                          CheckResult* scaled = nullptr);
CheckResult check_force_ordering(const Morphology& morph, const AeroModel& aero,
                                 const KinematicsParams& kin, const BodyPitch& pitch,
                                 const ValidationOptions& opt);
CheckResult check_ga(const ValidationOptions& opt);
CheckResult check_hover(const Morphology& morph, const AeroModel& aero,
                        const KinematicsParams& kin, const BodyPitch& pitch,
                        const GAConfig& ga, const ValidationOptions& opt);

// Chord-point velocity against a central difference of the inertial chord
// point along g exp(t xi); passes when the measured order is about 2 or the
// error is at round-off.
CheckResult check_lemma1(const Morphology& morph, const ValidationOptions& opt);
// Euler-Poincare residual built from finite differences of the Lagrangian
// (momentum rate along g exp(t xi) plus trivialized configuration gradient)
// against the accelerations of the equations of motion.
CheckResult check_variational(const Morphology& morph, const ValidationOptions& opt);
// Closed-form reduced equation vs block elimination; the reference N
// mismatch is reported as a warning.
CheckResult check_reduced_closed_form(const Morphology& morph, const AeroModel& aero,
                                      const KinematicsParams& kin, const ValidationOptions& opt);

// Every check, in a fixed order. The twelve acceptance checks come first.
ValidationReport run_all(const RunConfig& config, const ValidationOptions& opt);

}  // namespace ornithopter

#pragma once

#include <array>
#include <string>
#include <vector>

#include "ornithopter/so3.hpp"
#include "ornithopter/state.hpp"
#include "ornithopter/wing_geometry.hpp"

namespace ornithopter {

// One wing as a rigid body hinged at a spherical joint. The inertia is taken
// about the joint and expressed in the wing frame.
struct WingBody {
  double mass = 0.0;                // kg
  Mat3 inertia = Mat3::Zero();      // kg m^2, wing frame, about the joint
  Vec3 joint_offset = Vec3::Zero(); // mu_i: joint position in the body frame, m
  Vec3 com_offset = Vec3::Zero();   // kappa_i: wing CoM in the wing frame, m
  WingShape shape;
};

struct MorphologyReport {
  std::vector<std::string> warnings;     // physically suspicious input
  std::vector<std::string> diagnostics;  // informational (e.g. clamped chord)
};

struct Morphology {
  double body_mass = 0.0;             // kg
  Mat3 body_inertia = Mat3::Zero();   // kg m^2, body frame, about the body CoM
  std::array<WingBody, kWingCount> wings;
  double gravity = 9.81;              // m/s^2, acts along +e3

  double total_mass() const;

  // Throws std::invalid_argument when a mass is not positive or an inertia
  // is not symmetric positive definite. Softer problems are returned: a
  // warning per wing whose largest principal inertia exceeds m_i l_i^2, and
  // a diagnostic for each span interval where the chord is clamped.
  MorphologyReport validate() const;
};

// PaperLiteral uses the tabulated wing inertias (1e-3 kg m^2 scale) as
// joint inertias. Rescaled multiplies them by kRescaledInertiaFactor, reads
// the result as the inertia about the wing CoM, and shifts it to the joint
// with the parallel-axis theorem, so that J_i + m_i kappa_i^ kappa_i^ stays
// positive definite.
enum class InertiaMode { PaperLiteral, Rescaled };

inline constexpr double kRescaledInertiaFactor = 1e-6;

InertiaMode parse_inertia_mode(const std::string& name);
std::string to_string(InertiaMode mode);

// Dragonfly morphology: body modelled as a cylinder, four wings with the
// measured masses, spans, joint and CoM offsets, inertias and planform
// polynomials (degree 7, normalized span, chord_scale 0.01 m/unit).
Morphology default_dragonfly(InertiaMode mode = InertiaMode::Rescaled);

}  // namespace ornithopter

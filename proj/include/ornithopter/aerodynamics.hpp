#pragma once

#include <array>
#include <vector>

#include "ornithopter/morphology.hpp"
#include "ornithopter/so3.hpp"
#include "ornithopter/state.hpp"
#include "ornithopter/wing_geometry.hpp"

namespace ornithopter {

enum class TrigUnits { Degrees, Radians };

// gamma_ac(alpha) = slope |alpha| / pi + offset
struct AeroCenterLaw {
  double slope = 0.82;
  double offset = 0.05;
};

// C_L = c0 + amplitude sin(rate a - shift)
struct LiftLaw {
  double c0 = 0.225;
  double amplitude = 1.58;
  double rate = 2.13;
  double shift = 7.20;
};

// C_D = c0 - amplitude cos(rate a - shift)
struct DragLaw {
  double c0 = 1.92;
  double amplitude = 1.55;
  double rate = 2.04;
  double shift = 9.82;
};

struct AeroModel {
  double rho = 1.2;              // kg/m^3
  int stations = 300;            // midpoint stations per wing
  TrigUnits trig_units = TrigUnits::Degrees;
  double velocity_floor = 1e-9;  // m/s
  AeroCenterLaw center;
  LiftLaw lift;
  DragLaw drag;

  // Throws std::invalid_argument for rho < 0, stations < 2 or a
  // negative velocity floor.
  void validate() const;
};

// Loads of one wing, wing frame.
struct WingWrench {
  Vec3 lift = Vec3::Zero();    // N
  Vec3 drag = Vec3::Zero();    // N
  Vec3 moment = Vec3::Zero();  // N m, about the joint
  Vec3 force() const { return lift + drag; }
};
using WingWrenches = std::array<WingWrench, kWingCount>;

// Velocity field of the wing-frame chord points, W(nu) = base + spin x nu.
struct ChordVelocityField {
  Vec3 base = Vec3::Zero();  // (A_B A_i)^T p_dot + A_i^T (Omega_B x mu_i)
  Vec3 spin = Vec3::Zero();  // A_i^T Omega_B + Omega_i
  Vec3 at(const Vec3& nu) const { return base + spin.cross(nu); }
};

ChordVelocityField chord_velocity_field(const SystemState& state, const Morphology& morph,
                                        std::size_t wing);

// Inertial velocity of chord point nu_i(r, gamma), expressed in the wing frame.
Vec3 chord_point_velocity(const SystemState& state, const Morphology& morph, std::size_t wing,
                          double r, double gamma);

struct AttackAngle {
  double alpha = 0.0;           // rad, [0, pi]
  Vec3 effective = Vec3::Zero();  // P(e2) W
};

// Angle between the chord line e1 and the projected flow P(e2) w.
// Throws StagnantChord when |P(e2) w| <= velocity_floor.
AttackAngle angle_of_attack(const Vec3& w, double velocity_floor = 1e-9);

// Angle of attack at mid-chord of station r.
AttackAngle angle_of_attack(const SystemState& state, const Morphology& morph, std::size_t wing,
                            double r, double velocity_floor = 1e-9);

struct AeroCenter {
  double gamma = 0.0;
  Vec3 point = Vec3::Zero();  // c_f, wing frame
};

double aero_center_fraction(const AeroModel& model, double alpha);
AeroCenter aero_center(const AeroModel& model, double alpha, const WingShape& shape, double r);

struct AeroCoefficients {
  double lift = 0.0;
  double drag = 0.0;
};

// Folds alpha about pi/2 and evaluates the lift / drag laws.
AeroCoefficients aero_coefficients(const AeroModel& model, double alpha);

struct StationLoads {
  Vec3 lift = Vec3::Zero();
  Vec3 drag = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
  double alpha = 0.0;
  AeroCoefficients coefficients;
  bool stagnant = false;
};

// Strip loads at station r with width dr. Stagnant stations return zeros.
StationLoads station_loads(const AeroModel& model, const SystemState& state,
                           const Morphology& morph, std::size_t wing, double r, double dr);

// Strip loads from a precomputed velocity field and chord geometry.
StationLoads station_loads(const AeroModel& model, const ChordVelocityField& field,
                           double q_le, double chord, double span_coordinate, double dr);

// Midpoint stations of one wing with the chord geometry cached.
struct StationTable {
  std::vector<double> r;
  std::vector<double> q_le;
  std::vector<double> chord;
  double dr = 0.0;
  int side_parity = 1;

  static StationTable build(const WingShape& shape, int stations);
};

WingWrench wing_loads(const AeroModel& model, const SystemState& state, const Morphology& morph,
                      std::size_t wing);
WingWrench wing_loads(const AeroModel& model, const ChordVelocityField& field,
                      const StationTable& table);

// Morphology and aerodynamic model with the per-wing station tables cached.
class Vehicle {
 public:
  Vehicle(Morphology morphology, AeroModel aero);

  const Morphology& morphology() const { return morph_; }
  const AeroModel& aero() const { return aero_; }
  const StationTable& stations(std::size_t wing) const { return tables_[wing]; }

  // All four wrenches; zero without evaluating anything when rho == 0.
  WingWrenches wing_loads(const SystemState& state) const;

 private:
  Morphology morph_;
  AeroModel aero_;
  std::array<StationTable, kWingCount> tables_;
};

}  // namespace ornithopter

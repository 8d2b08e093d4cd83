#include "ornithopter/aerodynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ornithopter/errors.hpp"

namespace ornithopter {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;

// Projection onto the wing x-z plane, i.e. P(e2) w.
Vec3 drop_span(const Vec3& w) { return Vec3(w.x(), 0.0, w.z()); }

}  // namespace

void AeroModel::validate() const {
  if (!(rho >= 0.0)) throw std::invalid_argument("aero rho must be non-negative");
  if (stations < 2) throw std::invalid_argument("aero stations must be at least 2");
  if (!(velocity_floor >= 0.0)) throw std::invalid_argument("aero velocity_floor must be >= 0");
}

ChordVelocityField chord_velocity_field(const SystemState& state, const Morphology& morph,
                                        std::size_t wing) {
  const Mat3& ab = state.body_attitude.matrix();
  const Mat3& ai = state.wing_attitudes[wing].matrix();
  ChordVelocityField f;
  f.base = ai.transpose() * (ab.transpose() * state.velocity +
                             state.body_rate.cross(morph.wings[wing].joint_offset));
  f.spin = ai.transpose() * state.body_rate + state.wing_rates[wing];
  return f;
}

Vec3 chord_point_velocity(const SystemState& state, const Morphology& morph, std::size_t wing,
                          double r, double gamma) {
  const Vec3 nu = chord_point(morph.wings[wing].shape, r, gamma);
  return chord_velocity_field(state, morph, wing).at(nu);
}

AttackAngle angle_of_attack(const Vec3& w, double velocity_floor) {
  AttackAngle a;
  a.effective = drop_span(w);
  const double n = a.effective.norm();
  if (!(n > velocity_floor)) {
    throw StagnantChord("projected chord velocity below the floor");
  }
  a.alpha = std::acos(std::clamp(a.effective.x() / n, -1.0, 1.0));
  return a;
}

AttackAngle angle_of_attack(const SystemState& state, const Morphology& morph, std::size_t wing,
                            double r, double velocity_floor) {
  return angle_of_attack(chord_point_velocity(state, morph, wing, r, 0.5), velocity_floor);
}

double aero_center_fraction(const AeroModel& model, double alpha) {
  return model.center.slope * std::abs(alpha) / std::numbers::pi + model.center.offset;
}

AeroCenter aero_center(const AeroModel& model, double alpha, const WingShape& shape, double r) {
  AeroCenter c;
  c.gamma = aero_center_fraction(model, alpha);
  c.point = chord_point(shape, r, c.gamma);
  return c;
}

AeroCoefficients aero_coefficients(const AeroModel& model, double alpha) {
  const double folded = alpha <= std::numbers::pi / 2 ? alpha : std::numbers::pi - alpha;
  const double a = folded * kRadToDeg;
  const double to_trig = model.trig_units == TrigUnits::Degrees ? kDegToRad : 1.0;
  AeroCoefficients c;
  c.lift = model.lift.c0 +
           model.lift.amplitude * std::sin((model.lift.rate * a - model.lift.shift) * to_trig);
  c.drag = model.drag.c0 -
           model.drag.amplitude * std::cos((model.drag.rate * a - model.drag.shift) * to_trig);
  return c;
}

StationLoads station_loads(const AeroModel& model, const ChordVelocityField& field, double q_le,
                           double chord, double span_coordinate, double dr) {
  StationLoads out;
  const Vec3 mid(q_le - 0.5 * chord, span_coordinate, 0.0);
  const Vec3 w_mid = drop_span(field.at(mid));
  const double n_mid = w_mid.norm();
  if (!(n_mid > model.velocity_floor)) {
    out.stagnant = true;
    return out;
  }
  out.alpha = std::acos(std::clamp(w_mid.x() / n_mid, -1.0, 1.0));
  out.coefficients = aero_coefficients(model, out.alpha);

  const double gamma = aero_center_fraction(model, out.alpha);
  const Vec3 cf(q_le - gamma * chord, span_coordinate, 0.0);
  const Vec3 w = drop_span(field.at(cf));
  const double n = w.norm();
  if (!(n > model.velocity_floor)) {
    out.stagnant = true;
    return out;
  }
  const double q = 0.5 * model.rho * chord * n * dr;
  out.lift = q * out.coefficients.lift * sgn(w.x() * w.z()) * kE2.cross(w);
  out.drag = -q * out.coefficients.drag * w;
  out.moment = cf.cross(out.lift + out.drag);
  return out;
}

StationLoads station_loads(const AeroModel& model, const SystemState& state,
                           const Morphology& morph, std::size_t wing, double r, double dr) {
  const WingShape& shape = morph.wings[wing].shape;
  const ChordGeometry g = chord_geometry(shape, r);
  return station_loads(model, chord_velocity_field(state, morph, wing), g.q_le, g.chord,
                       shape.side_parity * r, dr);
}

StationTable StationTable::build(const WingShape& shape, int stations) {
  if (stations < 2) throw std::invalid_argument("station count must be at least 2");
  StationTable t;
  t.dr = shape.span_length / stations;
  t.side_parity = shape.side_parity;
  t.r.resize(static_cast<std::size_t>(stations));
  t.q_le.resize(t.r.size());
  t.chord.resize(t.r.size());
  for (std::size_t k = 0; k < t.r.size(); ++k) {
    t.r[k] = (static_cast<double>(k) + 0.5) * t.dr;
    const ChordGeometry g = chord_geometry(shape, t.r[k]);
    t.q_le[k] = g.q_le;
    t.chord[k] = g.chord;
  }
  return t;
}

WingWrench wing_loads(const AeroModel& model, const ChordVelocityField& field,
                      const StationTable& table) {
  WingWrench out;
  for (std::size_t k = 0; k < table.r.size(); ++k) {
    if (table.chord[k] <= 0.0) continue;
    const StationLoads s = station_loads(model, field, table.q_le[k], table.chord[k],
                                         table.side_parity * table.r[k], table.dr);
    out.lift += s.lift;
    out.drag += s.drag;
    out.moment += s.moment;
  }
  return out;
}

WingWrench wing_loads(const AeroModel& model, const SystemState& state, const Morphology& morph,
                      std::size_t wing) {
  return wing_loads(model, chord_velocity_field(state, morph, wing),
                    StationTable::build(morph.wings[wing].shape, model.stations));
}

Vehicle::Vehicle(Morphology morphology, AeroModel aero)
    : morph_(std::move(morphology)), aero_(aero) {
  for (std::size_t i = 0; i < kWingCount; ++i) {
    tables_[i] = StationTable::build(morph_.wings[i].shape, aero_.stations);
  }
}

WingWrenches Vehicle::wing_loads(const SystemState& state) const {
  WingWrenches out{};
  if (aero_.rho == 0.0) return out;
  for (std::size_t i = 0; i < kWingCount; ++i) {
    out[i] = ornithopter::wing_loads(aero_, chord_velocity_field(state, morph_, i), tables_[i]);
  }
  return out;
}

}  // namespace ornithopter

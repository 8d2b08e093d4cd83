#pragma once

#include <string>
#include <vector>

#include "ornithopter/so3.hpp"

namespace ornithopter {

// Flapping / pitching / deviation waveform of one wing. Angles in radians.
//   phi(t)   = phi_m / asin(phi_K) * asin(phi_K cos(2 pi f t + phi_a)) + phi_0
//   theta(t) = theta_m / tanh(theta_C) * tanh(theta_C sin(2 pi f t + theta_a)) + theta_0
//   psi(t)   = psi_m cos(2 pi psi_N f t + psi_a) + psi_0
struct WingWaveform {
  double f = 35.0;  // Hz
  double phi_m = 0.0, phi_0 = 0.0, phi_a = 0.0, phi_K = 0.5;
  double theta_m = 0.0, theta_0 = 0.0, theta_a = 0.0, theta_C = 1.0;
  double psi_m = 0.0, psi_0 = 0.0, psi_a = 0.0;
  int psi_N = 1;      // 1 or 2 (figure-eight)
  double beta = 0.0;  // stroke-plane angle

  // Throws std::invalid_argument on structural violations (f <= 0,
  // phi_K outside (0, 1], theta_C <= 0, psi_N not in {1, 2}).
  void validate() const;
};

struct AngleSample {
  double value = 0.0;
  double rate = 0.0;
  double accel = 0.0;
};

struct EulerAngles {
  AngleSample phi, theta, psi;
};

EulerAngles angle_profiles(const WingWaveform& w, double t);

// A = exp(beta e2^) exp(s phi e1^) exp(-s psi e3^) exp(theta e2^), s = side_parity(wing).
Rotation wing_attitude(const WingWaveform& w, std::size_t wing, double t);
Rotation wing_attitude_from_angles(double beta, double phi, double theta, double psi,
                                   std::size_t wing);

// Maps Euler-angle rates (phi, theta, psi) to the wing-frame angular velocity.
Mat3 euler_rate_jacobian(double theta, double psi, std::size_t wing);

Vec3 wing_angular_velocity(const WingWaveform& w, std::size_t wing, double t);
Vec3 wing_angular_acceleration(const WingWaveform& w, std::size_t wing, double t);

struct AnglesOnly {
  double phi, theta, psi;
};

// Recovers (phi, theta, psi) of an attitude given its stroke-plane angle.
AnglesOnly extract_angles(const Mat3& attitude, double beta, std::size_t wing);

struct WingStateSample {
  Rotation attitude;
  Vec3 rate = Vec3::Zero();
  Vec3 rate_dot = Vec3::Zero();
  EulerAngles angles;
};

WingStateSample sample_wing(const WingWaveform& w, std::size_t wing, double t);

// Central-difference variant of sample_wing's rate / rate_dot, for studies
// that want to bypass the closed forms.
WingStateSample sample_wing_fd(const WingWaveform& w, std::size_t wing, double t,
                               double h = 1e-6);

struct BoundViolation {
  std::string parameter;
  double value;  // in display units (degrees for angles)
  double lower;
  double upper;
  std::string message;
};

// Dragonfly kinematic ranges (degrees except f [Hz], phi_K and theta_C).
struct ParameterRange {
  const char* name;
  double lower;
  double upper;
  bool angle;
};
const std::vector<ParameterRange>& dragonfly_parameter_ranges();

std::vector<BoundViolation> check_bounds(const WingWaveform& w);

}  // namespace ornithopter

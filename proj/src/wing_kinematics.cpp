#include "ornithopter/wing_kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ornithopter/wing_geometry.hpp"

namespace ornithopter {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

AngleSample flapping(const WingWaveform& w, double t) {
  const double omega = kTwoPi * w.f;
  const double u = omega * t + w.phi_a;
  const double k = w.phi_K;
  const double gain = w.phi_m / std::asin(k);
  const double x = k * std::cos(u);
  const double xd = -k * omega * std::sin(u);
  const double xdd = -k * omega * omega * std::cos(u);

  AngleSample a;
  a.value = gain * std::asin(x) + w.phi_0;
  if (k >= 1.0 - 1e-12) {
    // Triangular limit: slope is piecewise constant.
    a.rate = -gain * omega * sgn(std::sin(u));
    a.accel = 0.0;
    return a;
  }
  const double one_minus = 1.0 - x * x;
  const double root = std::sqrt(one_minus);
  a.rate = gain * xd / root;
  a.accel = gain * (xdd / root + x * xd * xd / (one_minus * root));
  return a;
}

AngleSample pitching(const WingWaveform& w, double t) {
  const double omega = kTwoPi * w.f;
  const double v = omega * t + w.theta_a;
  const double c = w.theta_C;
  const double gain = w.theta_m / std::tanh(c);
  const double y = c * std::sin(v);
  const double yd = c * omega * std::cos(v);
  const double ydd = -c * omega * omega * std::sin(v);
  const double th = std::tanh(y);
  const double sech2 = 1.0 - th * th;

  AngleSample a;
  a.value = gain * th + w.theta_0;
  a.rate = gain * sech2 * yd;
  a.accel = gain * (sech2 * ydd - 2.0 * sech2 * th * yd * yd);
  return a;
}

AngleSample deviation(const WingWaveform& w, double t) {
  const double omega = kTwoPi * w.psi_N * w.f;
  const double u = omega * t + w.psi_a;
  AngleSample a;
  a.value = w.psi_m * std::cos(u) + w.psi_0;
  a.rate = -w.psi_m * omega * std::sin(u);
  a.accel = -w.psi_m * omega * omega * std::cos(u);
  return a;
}

}  // namespace

void WingWaveform::validate() const {
  if (!(f > 0.0)) throw std::invalid_argument("waveform frequency f must be positive");
  if (!(phi_K > 0.0 && phi_K <= 1.0)) throw std::invalid_argument("phi_K must lie in (0, 1]");
  if (!(theta_C > 0.0)) throw std::invalid_argument("theta_C must be positive");
  if (psi_N != 1 && psi_N != 2) throw std::invalid_argument("psi_N must be 1 or 2");
}

EulerAngles angle_profiles(const WingWaveform& w, double t) {
  return EulerAngles{flapping(w, t), pitching(w, t), deviation(w, t)};
}

Rotation wing_attitude_from_angles(double beta, double phi, double theta, double psi,
                                   std::size_t wing) {
  const double s = side_parity(wing);
  return exp_so3(kE2, beta) * exp_so3(kE1, s * phi) * exp_so3(kE3, -s * psi) *
         exp_so3(kE2, theta);
}

Rotation wing_attitude(const WingWaveform& w, std::size_t wing, double t) {
  const EulerAngles a = angle_profiles(w, t);
  return wing_attitude_from_angles(w.beta, a.phi.value, a.theta.value, a.psi.value, wing);
}

Mat3 euler_rate_jacobian(double theta, double psi, std::size_t wing) {
  const double s = side_parity(wing);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(psi), sp = std::sin(psi);
  Mat3 j;
  j << s * cp * ct, 0.0, s * st,
       sp, 1.0, 0.0,
       s * cp * st, 0.0, -s * ct;
  return j;
}

Vec3 wing_angular_velocity(const WingWaveform& w, std::size_t wing, double t) {
  const EulerAngles a = angle_profiles(w, t);
  return euler_rate_jacobian(a.theta.value, a.psi.value, wing) *
         Vec3(a.phi.rate, a.theta.rate, a.psi.rate);
}

Vec3 wing_angular_acceleration(const WingWaveform& w, std::size_t wing, double t) {
  const EulerAngles a = angle_profiles(w, t);
  const double s = side_parity(wing);
  const double th = a.theta.value, ps = a.psi.value;
  const double ct = std::cos(th), st = std::sin(th);
  const double cp = std::cos(ps), sp = std::sin(ps);
  Mat3 d_theta;
  d_theta << -s * cp * st, 0.0, s * ct,
             0.0, 0.0, 0.0,
             s * cp * ct, 0.0, s * st;
  Mat3 d_psi;
  d_psi << -s * sp * ct, 0.0, 0.0,
           cp, 0.0, 0.0,
           -s * sp * st, 0.0, 0.0;
  const Mat3 jdot = d_theta * a.theta.rate + d_psi * a.psi.rate;
  const Vec3 rates(a.phi.rate, a.theta.rate, a.psi.rate);
  const Vec3 accels(a.phi.accel, a.theta.accel, a.psi.accel);
  return jdot * rates + euler_rate_jacobian(th, ps, wing) * accels;
}

AnglesOnly extract_angles(const Mat3& attitude, double beta, std::size_t wing) {
  // attitude = Ry(beta) Rx(a) Rz(b) Ry(c) with a = s phi, b = -s psi, c = theta.
  const Mat3 m = exp_so3(kE2, beta).matrix().transpose() * attitude;
  const double s = side_parity(wing);
  const double b = std::asin(std::clamp(-m(0, 1), -1.0, 1.0));
  const double a = std::atan2(m(2, 1), m(1, 1));
  const double c = std::atan2(m(0, 2), m(0, 0));
  return AnglesOnly{s * a, c, -s * b};
}

WingStateSample sample_wing(const WingWaveform& w, std::size_t wing, double t) {
  WingStateSample out;
  out.angles = angle_profiles(w, t);
  out.attitude = wing_attitude_from_angles(w.beta, out.angles.phi.value,
                                           out.angles.theta.value, out.angles.psi.value, wing);
  out.rate = wing_angular_velocity(w, wing, t);
  out.rate_dot = wing_angular_acceleration(w, wing, t);
  return out;
}

WingStateSample sample_wing_fd(const WingWaveform& w, std::size_t wing, double t, double h) {
  WingStateSample out;
  out.angles = angle_profiles(w, t);
  out.attitude = wing_attitude(w, wing, t);
  const Mat3 ap = wing_attitude(w, wing, t + h).matrix();
  const Mat3 am = wing_attitude(w, wing, t - h).matrix();
  const Mat3& a0 = out.attitude.matrix();
  out.rate = vee(a0.transpose() * (ap - am) / (2.0 * h));
  const Vec3 rp = vee(ap.transpose() * (wing_attitude(w, wing, t + 2 * h).matrix() - a0) / (2.0 * h));
  const Vec3 rm = vee(am.transpose() * (a0 - wing_attitude(w, wing, t - 2 * h).matrix()) / (2.0 * h));
  out.rate_dot = (rp - rm) / (2.0 * h);
  return out;
}

const std::vector<ParameterRange>& dragonfly_parameter_ranges() {
  static const std::vector<ParameterRange> ranges = {
      {"f", 30.0, 45.0, false},        {"phi_m", 30.0, 60.0, true},
      {"psi_m", 1.0, 20.0, true},      {"theta_m", 1.0, 90.0, true},
      {"phi_0", -30.0, 30.0, true},    {"psi_0", 5.0, 30.0, true},
      {"theta_0", -90.0, 90.0, true},  {"psi_a", -180.0, 180.0, true},
      {"phi_a", -180.0, 180.0, true},  {"theta_a", -180.0, 180.0, true},
      {"phi_K", 0.01, 1.0, false},     {"theta_C", 0.01, 5.0, false},
      {"beta", 5.0, 30.0, true},
  };
  return ranges;
}

std::vector<BoundViolation> check_bounds(const WingWaveform& w) {
  const auto value_of = [&](const std::string& name) {
    if (name == "f") return w.f;
    if (name == "phi_m") return w.phi_m;
    if (name == "psi_m") return w.psi_m;
    if (name == "theta_m") return w.theta_m;
    if (name == "phi_0") return w.phi_0;
    if (name == "psi_0") return w.psi_0;
    if (name == "theta_0") return w.theta_0;
    if (name == "psi_a") return w.psi_a;
    if (name == "phi_a") return w.phi_a;
    if (name == "theta_a") return w.theta_a;
    if (name == "phi_K") return w.phi_K;
    if (name == "theta_C") return w.theta_C;
    return w.beta;
  };
  std::vector<BoundViolation> out;
  for (const auto& r : dragonfly_parameter_ranges()) {
    double v = value_of(r.name);
    if (r.angle) v *= 180.0 / std::numbers::pi;
    const double slack = 1e-9 * std::max(1.0, std::abs(r.upper - r.lower));
    if (v < r.lower - slack || v > r.upper + slack) {
      std::ostringstream msg;
      const char* unit = r.angle ? "°" : (std::string(r.name) == "f" ? " Hz" : "");
      msg << r.name << " = " << v << unit << (v > r.upper ? " exceeds" : " is below")
          << " the dragonfly kinematic range [" << r.lower << unit << ", " << r.upper << unit
          << "]";
      out.push_back(BoundViolation{r.name, v, r.lower, r.upper, msg.str()});
    }
  }
  return out;
}

}  // namespace ornithopter

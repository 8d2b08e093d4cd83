#include "ornithopter/reduced_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ornithopter/errors.hpp"

namespace ornithopter {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Vec12 wing_part(const Vec18& x) { return x.segment<12>(6); }

Mat3 sq(const Mat3& m) { return m * m; }

struct WingQuantities {
  double m;
  Mat3 a;       // A_i
  Mat3 j;       // joint inertia, wing frame
  Mat3 jbar;    // CoM inertia, wing frame
  Mat3 mu_hat;  // mu_i^
  Mat3 rho_hat; // (A_i kappa_i)^
  Vec3 kappa;
  Vec3 r;       // mu_i + A_i kappa_i
};

WingQuantities wing_quantities(const SystemState& s, const Morphology& morph, std::size_t i) {
  const WingBody& wb = morph.wings[i];
  WingQuantities q;
  q.m = wb.mass;
  q.a = s.wing_attitudes[i].matrix();
  q.j = wb.inertia;
  q.kappa = wb.com_offset;
  q.jbar = wb.inertia + wb.mass * sq(hat(wb.com_offset));
  q.mu_hat = hat(wb.joint_offset);
  const Vec3 rho = q.a * wb.com_offset;
  q.rho_hat = hat(rho);
  q.r = wb.joint_offset + rho;
  return q;
}

double safe_ratio(double num, double den) { return num / std::max(den, 1e-300); }

}  // namespace

PitchSample body_pitch(const BodyPitch& pitch, double f, double t) {
  const double w = 2.0 * std::numbers::pi * f;
  const double arg = w * t + pitch.phase;
  PitchSample s;
  s.angle = pitch.amplitude * std::cos(arg) + pitch.offset;
  s.attitude = exp_so3(kE2, s.angle);
  s.rate = -pitch.amplitude * w * std::sin(arg) * kE2;
  s.rate_dot = -pitch.amplitude * w * w * std::cos(arg) * kE2;
  return s;
}

KinematicsParams dragonfly_hover_kinematics() {
  WingWaveform fore;
  fore.f = 35.6476;
  fore.phi_m = 58.42 * kDeg;
  fore.psi_m = 11.16 * kDeg;
  fore.theta_m = 1.43 * kDeg;
  fore.phi_0 = 4.64 * kDeg;
  fore.psi_0 = 26.49 * kDeg;
  fore.theta_0 = -35.24 * kDeg;
  fore.phi_a = 0.0;
  fore.psi_a = -40.10 * kDeg;
  fore.theta_a = -98.82 * kDeg;
  fore.phi_K = 0.533;
  fore.theta_C = 2.394;
  fore.beta = 10.95 * kDeg;
  fore.psi_N = 1;

  WingWaveform hind;
  hind.f = 35.6476;
  hind.phi_m = 32.48 * kDeg;
  hind.psi_m = 4.26 * kDeg;
  hind.theta_m = 37.18 * kDeg;
  hind.phi_0 = 28.49 * kDeg;
  hind.psi_0 = 20.29 * kDeg;
  hind.theta_0 = -1.83 * kDeg;
  hind.phi_a = 92.56 * kDeg;
  hind.psi_a = 29.37 * kDeg;
  hind.theta_a = -138.47 * kDeg;
  hind.phi_K = 0.895;
  hind.theta_C = 1.613;
  hind.beta = 23.53 * kDeg;
  hind.psi_N = 1;

  KinematicsParams p;
  p.wings = {fore, fore, hind, hind};
  return p;
}

BodyPitch dragonfly_hover_pitch() {
  return BodyPitch{0.37 * kDeg, -5.72 * kDeg, 0.434 * kDeg};
}

WingSamples sample_wings(const KinematicsParams& params, double t) {
  WingSamples out;
  for (std::size_t i = 0; i < kWingCount; ++i) {
    out[i] = params.finite_difference ? sample_wing_fd(params.wings[i], i, t, params.fd_step)
                                      : sample_wing(params.wings[i], i, t);
  }
  return out;
}

SystemState compose_state(const BodyState& body, const WingSamples& wings) {
  SystemState s;
  s.t = body.t;
  s.position = body.position;
  s.body_attitude = body.attitude;
  s.velocity = body.velocity;
  s.body_rate = body.body_rate;
  for (std::size_t i = 0; i < kWingCount; ++i) {
    s.wing_attitudes[i] = wings[i].attitude;
    s.wing_rates[i] = wings[i].rate;
  }
  return s;
}

BodyState body_part(const SystemState& state) {
  BodyState b;
  b.t = state.t;
  b.position = state.position;
  b.attitude = state.body_attitude;
  b.velocity = state.velocity;
  b.body_rate = state.body_rate;
  return b;
}

ReducedTerms reduced_terms(const Vehicle& vehicle, const SystemState& state,
                           const Vec12& wing_rate_dot) {
  ReducedTerms r;
  r.state = state;
  r.wing_rate_dot = wing_rate_dot;
  EomTerms eom = eom_terms(vehicle, r.state);
  r.c11 = eom.mass.topLeftCorner<6, 6>();
  r.c12 = eom.mass.topRightCorner<6, 12>();
  r.c21 = eom.mass.bottomLeftCorner<12, 6>();
  r.c22 = eom.mass.bottomRightCorner<12, 12>();
  r.coriolis1 = eom.coriolis.head<6>();
  r.coriolis2 = wing_part(eom.coriolis);
  r.aero1 = eom.aero.head<6>();
  r.aero2 = wing_part(eom.aero);
  r.gravity1 = eom.gravity.head<6>();
  r.gravity2 = wing_part(eom.gravity);
  r.k.setZero();
  for (std::size_t i = 0; i < kWingCount; ++i) {
    r.k.block<3, 3>(3, 3 * static_cast<Eigen::Index>(i)) = -r.state.wing_attitudes[i].matrix();
  }
  r.wrenches = eom.wrenches;
  return r;
}

ReducedTerms reduced_terms(const Vehicle& vehicle, const BodyState& body,
                           const KinematicsParams& params) {
  const WingSamples wings = sample_wings(params, body.t);
  Vec12 wing_rate_dot;
  for (std::size_t i = 0; i < kWingCount; ++i) {
    wing_rate_dot.segment<3>(3 * static_cast<Eigen::Index>(i)) = wings[i].rate_dot;
  }
  return reduced_terms(vehicle, compose_state(body, wings), wing_rate_dot);
}

namespace {

Vec6 solve_scaled(const Mat6& m, const Vec6& b) {
  Vec6 d;
  for (int k = 0; k < 6; ++k) {
    const double diag = std::abs(m(k, k));
    if (!(diag > 0.0) || !std::isfinite(diag)) {
      throw SingularReducedMass("reduced mass matrix has a zero or non-finite diagonal entry");
    }
    d(k) = 1.0 / std::sqrt(diag);
  }
  const Mat6 scaled = d.asDiagonal() * m * d.asDiagonal();
  Eigen::PartialPivLU<Mat6> lu(scaled);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-13)) {
    throw SingularReducedMass("reduced mass matrix C11 - K C21 is singular (rcond = " +
                              std::to_string(rcond) + ")");
  }
  Vec6 y = lu.solve(d.asDiagonal() * b);
  const Vec6 res = d.asDiagonal() * b - scaled * y;
  y += lu.solve(res);
  return d.asDiagonal() * y;
}

Mat6 reduced_mass(const ReducedTerms& t) { return t.c11 - t.k * t.c21; }

Vec6 reduced_force(const ReducedTerms& t) {
  const Vec12& wd = t.wing_rate_dot;
  return t.aero1 + t.gravity1 - t.coriolis1 - t.c12 * wd +
         t.k * (t.c22 * wd + t.coriolis2 - t.aero2 - t.gravity2);
}

}  // namespace

Vec6 solve_reduced(const ReducedTerms& terms) {
  return solve_scaled(reduced_mass(terms), reduced_force(terms));
}

Vec6 reduced_rhs(const Vehicle& vehicle, const BodyState& body, const KinematicsParams& params) {
  return solve_reduced(reduced_terms(vehicle, body, params));
}

Torques recover_torques(const ReducedTerms& terms, const Vec6& body_accel) {
  const Vec12 fu2 = terms.c21 * body_accel + terms.c22 * terms.wing_rate_dot + terms.coriolis2 -
                    terms.aero2 - terms.gravity2;
  Torques tau;
  for (std::size_t i = 0; i < kWingCount; ++i) {
    tau[i] = terms.state.wing_attitudes[i].matrix() *
             fu2.segment<3>(3 * static_cast<Eigen::Index>(i));
  }
  return tau;
}

Torques recover_torques(const Vehicle& vehicle, const BodyState& body, const Vec6& body_accel,
                        const KinematicsParams& params) {
  return recover_torques(reduced_terms(vehicle, body, params), body_accel);
}

TorqueLaw tracking_torque_law(const Vehicle& vehicle, const KinematicsParams& params,
                              const TrackingGains& gains) {
  const double kp = gains.natural_frequency * gains.natural_frequency;
  const double kd = 2.0 * gains.damping * gains.natural_frequency;
  return [&vehicle, params, kp, kd](const SystemState& x) {
    const WingSamples desired = sample_wings(params, x.t);
    Vec12 accel;
    for (std::size_t i = 0; i < kWingCount; ++i) {
      const Mat3& a = x.wing_attitudes[i].matrix();
      const Mat3& ad = desired[i].attitude.matrix();
      const Mat3 rel = a.transpose() * ad;
      const Vec3 e_r = 0.5 * vee(ad.transpose() * a - a.transpose() * ad);
      const Vec3 omega_d = rel * desired[i].rate;
      const Vec3 e_w = x.wing_rates[i] - omega_d;
      accel.segment<3>(3 * static_cast<Eigen::Index>(i)) =
          rel * desired[i].rate_dot - x.wing_rates[i].cross(omega_d) - kp * e_r - kd * e_w;
    }
    const ReducedTerms t = reduced_terms(vehicle, x, accel);
    return recover_torques(t, solve_reduced(t));
  };
}

namespace {

// Position and attitude increments of the reduced RKMK scheme.
struct BodyIncrement {
  Vec3 dp = Vec3::Zero();
  Vec3 u = Vec3::Zero();
};

BodyIncrement rate_of(const BodyIncrement& inc, const Vec6& xi) {
  return {xi.head<3>(), dexp_inv(inc.u) * xi.tail<3>()};
}

BodyState displaced(const BodyState& base, const BodyIncrement& inc, const Vec6& xi, double t) {
  BodyState b;
  b.t = t;
  b.position = base.position + inc.dp;
  b.attitude = base.attitude * exp_so3(inc.u);
  b.velocity = xi.head<3>();
  b.body_rate = xi.tail<3>();
  return b;
}

BodyIncrement scaled(double s, const BodyIncrement& a) { return {s * a.dp, s * a.u}; }

}  // namespace

BodyState step_reduced(const Vehicle& vehicle, const BodyState& body,
                       const KinematicsParams& params, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_reduced: dt must be positive");
  const auto accel = [&](const BodyState& b) {
    const Vec6 a = reduced_rhs(vehicle, b, params);
    if (!a.allFinite()) {
      throw NonFiniteState("body acceleration became non-finite at t = " + std::to_string(b.t) +
                               " s",
                           b.t);
    }
    return a;
  };
  const Vec6 xi0 = body.xi();

  const Vec6 a1 = accel(body);
  const BodyIncrement d1 = rate_of({}, xi0);

  const BodyIncrement u2 = scaled(0.5 * dt, d1);
  const Vec6 xi2 = xi0 + 0.5 * dt * a1;
  const Vec6 a2 = accel(displaced(body, u2, xi2, body.t + 0.5 * dt));
  const BodyIncrement d2 = rate_of(u2, xi2);

  const BodyIncrement u3 = scaled(0.5 * dt, d2);
  const Vec6 xi3 = xi0 + 0.5 * dt * a2;
  const Vec6 a3 = accel(displaced(body, u3, xi3, body.t + 0.5 * dt));
  const BodyIncrement d3 = rate_of(u3, xi3);

  const BodyIncrement u4 = scaled(dt, d3);
  const Vec6 xi4 = xi0 + dt * a3;
  const Vec6 a4 = accel(displaced(body, u4, xi4, body.t + dt));
  const BodyIncrement d4 = rate_of(u4, xi4);

  BodyIncrement u;
  u.dp = dt / 6.0 * (d1.dp + 2.0 * d2.dp + 2.0 * d3.dp + d4.dp);
  u.u = dt / 6.0 * (d1.u + 2.0 * d2.u + 2.0 * d3.u + d4.u);
  const Vec6 xi = xi0 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  if (!u.dp.allFinite() || !u.u.allFinite() || !xi.allFinite()) {
    throw NonFiniteState("reduced state became non-finite at t = " + std::to_string(body.t + dt) +
                             " s",
                         body.t + dt);
  }
  return displaced(body, u, xi, body.t + dt);
}

ReducedCrossCheck reduced_cross_check(const Vehicle& vehicle, const BodyState& body,
                                      const KinematicsParams& params) {
  const Morphology& morph = vehicle.morphology();
  const ReducedTerms t = reduced_terms(vehicle, body, params);
  const SystemState& s = t.state;
  const Mat3 ab = s.body_attitude.matrix();

  // Closed form of C11 - K C21 written from the per-wing energy blocks.
  Mat6 closed = Mat6::Zero();
  closed.block<3, 3>(0, 0) = morph.total_mass() * Mat3::Identity();
  closed.block<3, 3>(3, 3) = morph.body_inertia;
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const WingQuantities q = wing_quantities(s, morph, i);
    const Mat3 r_hat = q.mu_hat + q.rho_hat;
    closed.block<3, 3>(0, 3) -= q.m * ab * r_hat;
    closed.block<3, 3>(3, 0) += q.m * (q.mu_hat + 2.0 * q.rho_hat) * ab.transpose();
    closed.block<3, 3>(3, 3) += 2.0 * q.a * q.j * q.a.transpose() - q.m * q.mu_hat * q.mu_hat -
                                q.m * q.mu_hat * q.rho_hat - 2.0 * q.m * q.rho_hat * q.mu_hat;
  }
  const Mat6 block = reduced_mass(t);

  ReducedCrossCheck out;
  out.mass_mismatch = safe_ratio((closed - block).cwiseAbs().maxCoeff(), block.cwiseAbs().maxCoeff());

  const Vec6 accel = solve_scaled(block, reduced_force(t));
  const Mat18 sm = assemble_S(s);
  const Mat6 s11 = sm.topLeftCorner<6, 6>();
  const Mat12 s22 = sm.bottomRightCorner<12, 12>();
  const Vec18 xi = s.xi();
  const Vec6 xb = xi.head<6>();
  const Vec12 xw = wing_part(xi);
  const Vec12& wd = t.wing_rate_dot;

  const auto closed_form = [&](const Mat18& n) {
    const Mat6 n11 = n.topLeftCorner<6, 6>();
    const Mat6x12 n12 = n.topRightCorner<6, 12>();
    const Mat12x6 n21 = n.bottomLeftCorner<12, 6>();
    const Mat12 n22 = n.bottomRightCorner<12, 12>();
    const Vec6 rhs = (t.k * s22 * t.c21 - s11 * t.c11) * xb + (t.k * n21 - n11) * xb +
                     (t.k * t.c22 - t.c12) * wd + (t.k * s22 * t.c22 - s11 * t.c12) * xw +
                     (t.k * n22 - n12) * xw + t.aero1 + t.gravity1 -
                     t.k * (t.aero2 + t.gravity2);
    const Vec6 a = solve_scaled(closed, rhs);
    return safe_ratio((a - accel).norm(), accel.norm());
  };
  out.derived_mismatch = closed_form(coupling_blocks(s, morph));
  out.reference_mismatch = closed_form(reference_coupling_blocks(s, morph));
  return out;
}

ForceDecomposition decompose_forces(const Morphology& morph, const SystemState& state,
                                    const WingWrenches& wrenches, const Vec6& body_accel,
                                    const std::array<Vec3, kWingCount>& wing_rate_dot) {
  const Mat3 ab = state.body_attitude.matrix();
  const Vec3 w = state.body_rate;
  const Mat3 w_hat = hat(w);
  const Vec3 pdd = body_accel.head<3>();
  const Vec3 wd = body_accel.tail<3>();
  const Vec3 g_body = morph.gravity * ab.transpose() * kE3;

  ForceDecomposition out;
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const WingQuantities q = wing_quantities(state, morph, i);
    const Vec3& om = state.wing_rates[i];
    const Vec3& omd = wing_rate_dot[i];
    const Mat3 om_hat = hat(om);
    const Mat3 kappa_hat = hat(q.kappa);
    const Mat3 r_hat = hat(q.r);
    const Mat3 lever = q.mu_hat + 2.0 * q.rho_hat;

    const Vec3 f = wrenches[i].force();
    out.f_c += ab * q.a * f;
    out.gamma_c += q.mu_hat * q.a * f + q.a * wrenches[i].moment;

    out.f_b += q.m * ab * (r_hat * wd + w_hat * r_hat * w);
    out.f_w += q.m * ab *
               (2.0 * w_hat * q.a * kappa_hat * om + q.a * kappa_hat * omd +
                q.a * om_hat * kappa_hat * om);

    const Vec3 body_quad = w_hat * w_hat * q.r;
    const Vec3 beta = body_quad + 2.0 * w_hat * q.a * om_hat * q.kappa +
                      q.a * om_hat * om_hat * q.kappa;
    const Vec3 qb = q.a.transpose() * w;
    const Vec3 omega = qb + om;
    const Vec3 body_gyro = 2.0 * w_hat * q.a * q.jbar * q.a.transpose() * w;

    out.gamma_b += -q.m * lever * ab.transpose() * pdd -
                   (2.0 * q.a * q.j * q.a.transpose() - q.m * q.mu_hat * q.mu_hat -
                    q.m * q.mu_hat * q.rho_hat - 2.0 * q.m * q.rho_hat * q.mu_hat) *
                       wd -
                   (q.m * lever * body_quad + body_gyro) + q.m * lever * g_body;
    out.gamma_w += -(2.0 * q.a * q.j - q.m * q.mu_hat * q.a * kappa_hat) * omd -
                   (q.m * lever * (beta - body_quad) +
                    2.0 * q.a * (q.jbar * qb.cross(om) + omega.cross(q.jbar * omega)) -
                    body_gyro);
  }
  return out;
}

ForceDecomposition decompose_forces(const Vehicle& vehicle, const BodyState& body,
                                    const KinematicsParams& params, Vec6* body_accel) {
  const ReducedTerms t = reduced_terms(vehicle, body, params);
  const Vec6 accel = solve_reduced(t);
  if (body_accel) *body_accel = accel;
  std::array<Vec3, kWingCount> wd;
  for (std::size_t i = 0; i < kWingCount; ++i) {
    wd[i] = t.wing_rate_dot.segment<3>(3 * static_cast<Eigen::Index>(i));
  }
  return decompose_forces(vehicle.morphology(), t.state, t.wrenches, accel, wd);
}

ClosureResidual closure_residual(const Morphology& morph, const BodyState& body,
                                 const ForceDecomposition& forces, const Vec6& body_accel) {
  const double m = morph.total_mass();
  const Vec3 mv = m * body_accel.head<3>();
  const Vec3 trans = mv - (m * morph.gravity * kE3 + forces.f_c + forces.f_b + forces.f_w);
  const Vec3 jw = morph.body_inertia * body_accel.tail<3>();
  const Vec3 gyro = body.body_rate.cross(morph.body_inertia * body.body_rate);
  const Vec3 rot = jw - (-gyro + forces.gamma_c + forces.gamma_b + forces.gamma_w);
  ClosureResidual r;
  r.translational = trans.norm() / std::max(1.0, mv.norm());
  r.rotational = rot.norm() / std::max(1.0, jw.norm());
  return r;
}

Vec3 prescribed_acceleration(const Vehicle& vehicle, const KinematicsParams& params,
                             const BodyPitch& pitch, double t, const Vec3& p, const Vec3& v,
                             ForceDecomposition* forces) {
  const Morphology& morph = vehicle.morphology();
  const PitchSample ps = body_pitch(pitch, params.frequency(), t);
  BodyState body;
  body.t = t;
  body.position = p;
  body.attitude = ps.attitude;
  body.velocity = v;
  body.body_rate = ps.rate;
  const WingSamples wings = sample_wings(params, t);
  const SystemState s = compose_state(body, wings);
  const WingWrenches wrenches = vehicle.wing_loads(s);
  std::array<Vec3, kWingCount> wd;
  for (std::size_t i = 0; i < kWingCount; ++i) wd[i] = wings[i].rate_dot;

  // F_c, F_B and F_w do not depend on v_dot; Gamma_B does, so it is
  // re-evaluated once v_dot is known.
  Vec6 accel;
  accel << Vec3::Zero(), ps.rate_dot;
  ForceDecomposition d = decompose_forces(morph, s, wrenches, accel, wd);
  const double m = morph.total_mass();
  const Vec3 vdot = morph.gravity * kE3 + (d.f_c + d.f_b + d.f_w) / m;
  if (forces) {
    accel.head<3>() = vdot;
    *forces = decompose_forces(morph, s, wrenches, accel, wd);
  }
  return vdot;
}

bool integrate_prescribed(const Vehicle& vehicle, const KinematicsParams& params,
                          const BodyPitch& pitch, const Vec3& p0, const Vec3& v0,
                          double duration, double dt, const PrescribedVisitor& visit,
                          double* diverged_at) {
  if (!(dt > 0.0)) throw std::invalid_argument("prescribed simulation: dt must be positive");
  if (!(duration >= 0.0)) throw std::invalid_argument("prescribed simulation: negative duration");
  const auto steps = static_cast<long>(std::llround(duration / dt));
  const auto acc = [&](double tt, const Vec3& pp, const Vec3& vv) {
    return prescribed_acceleration(vehicle, params, pitch, tt, pp, vv);
  };
  double t = 0.0;
  Vec3 p = p0, v = v0;
  if (visit) visit(t, p, v);
  for (long n = 0; n < steps; ++n) {
    const Vec3 k1v = acc(t, p, v);
    const Vec3 k1p = v;
    const Vec3 k2p = v + 0.5 * dt * k1v;
    const Vec3 k2v = acc(t + 0.5 * dt, p + 0.5 * dt * k1p, k2p);
    const Vec3 k3p = v + 0.5 * dt * k2v;
    const Vec3 k3v = acc(t + 0.5 * dt, p + 0.5 * dt * k2p, k3p);
    const Vec3 k4p = v + dt * k3v;
    const Vec3 k4v = acc(t + dt, p + dt * k3p, k4p);
    p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    t = static_cast<double>(n + 1) * dt;
    if (!p.allFinite() || !v.allFinite() || p.norm() > 1e6) {
      if (diverged_at) *diverged_at = t;
      return false;
    }
    if (visit) visit(t, p, v);
  }
  return true;
}

PrescribedRun prescribed_body_sim(const Vehicle& vehicle, const KinematicsParams& params,
                                  const BodyPitch& pitch, const Vec3& p0, const Vec3& v0,
                                  double duration, double dt, int stride) {
  stride = std::max(stride, 1);
  const double f = params.frequency();
  const auto steps = static_cast<long>(std::llround(duration / dt));
  PrescribedRun run;
  long n = 0;
  const auto record = [&](double t, const Vec3& p, const Vec3& v) {
    if (n % stride == 0 || n == steps) {
      PrescribedSample sample;
      sample.t = t;
      sample.position = p;
      sample.velocity = v;
      sample.pitch = body_pitch(pitch, f, t).angle;
      prescribed_acceleration(vehicle, params, pitch, t, p, v, &sample.forces);
      run.samples.push_back(sample);
    }
    ++n;
  };
  run.diverged =
      !integrate_prescribed(vehicle, params, pitch, p0, v0, duration, dt, record, &run.diverged_at);
  return run;
}

}  // namespace ornithopter

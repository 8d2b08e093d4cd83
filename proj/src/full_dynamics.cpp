#include "ornithopter/full_dynamics.hpp"

#include <cmath>
#include <string>

#include "ornithopter/errors.hpp"

namespace ornithopter {

namespace {

// Per-wing quantities shared by the assembly routines.
struct WingTerms {
  double m;
  Mat3 a;       // A_i
  Mat3 j;       // J_i about the joint
  Mat3 jbar;    // J_i + m kappa^2, about the wing CoM
  Mat3 mu_h;    // mu^
  Mat3 kap_h;   // kappa^
  Mat3 rho_h;   // (A kappa)^
  Mat3 r_h;     // (mu + A kappa)^
  Vec3 r;       // mu + A kappa
  Vec3 omega;   // Omega_i
  Vec3 q;       // A^T Omega_B
  Vec3 spin;    // A^T Omega_B + Omega_i
};

WingTerms wing_terms(const SystemState& s, const Morphology& morph, std::size_t i) {
  const WingBody& w = morph.wings[i];
  WingTerms t;
  t.m = w.mass;
  t.a = s.wing_attitudes[i].matrix();
  t.j = w.inertia;
  t.kap_h = hat(w.com_offset);
  t.jbar = t.j + t.m * t.kap_h * t.kap_h;
  t.mu_h = hat(w.joint_offset);
  const Vec3 rho = t.a * w.com_offset;
  t.rho_h = hat(rho);
  t.r = w.joint_offset + rho;
  t.r_h = hat(t.r);
  t.omega = s.wing_rates[i];
  t.q = t.a.transpose() * s.body_rate;
  t.spin = t.q + t.omega;
  return t;
}

template <typename M>
auto block(M& m, Eigen::Index row, Eigen::Index col) {
  return m.template block<3, 3>(row, col);
}

}  // namespace

Mat9 mass_block(const SystemState& state, const Morphology& morph, std::size_t wing) {
  const WingTerms t = wing_terms(state, morph, wing);
  const Mat3 ab = state.body_attitude.matrix();
  const Mat3 j21 = t.m * t.r_h * ab.transpose();
  const Mat3 j31 = t.m * t.kap_h * t.a.transpose() * ab.transpose();
  const Mat3 j22 = t.a * t.j * t.a.transpose() - t.m * t.mu_h * t.mu_h -
                   t.m * t.mu_h * t.rho_h - t.m * t.rho_h * t.mu_h + 0.25 * morph.body_inertia;
  const Mat3 j32 = t.j * t.a.transpose() + t.m * t.kap_h.transpose() * t.a.transpose() * t.mu_h;

  Mat9 out;
  block(out, 0, 0) = (0.25 * morph.body_mass + t.m) * Mat3::Identity();
  block(out, 3, 0) = j21;
  block(out, 0, 3) = j21.transpose();
  block(out, 6, 0) = j31;
  block(out, 0, 6) = j31.transpose();
  block(out, 3, 3) = j22;
  block(out, 6, 3) = j32;
  block(out, 3, 6) = j32.transpose();
  block(out, 6, 6) = t.j;
  return out;
}

Mat18 assemble_C(const SystemState& state, const Morphology& morph) {
  Mat18 c = Mat18::Zero();
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const Mat9 ji = mass_block(state, morph, i);
    const Eigen::Index w = wing_block(i);
    c.block<6, 6>(0, 0) += ji.block<6, 6>(0, 0);
    c.block<6, 3>(0, w) = ji.block<6, 3>(0, 6);
    c.block<3, 6>(w, 0) = ji.block<3, 6>(6, 0);
    block(c, w, w) = ji.block<3, 3>(6, 6);
  }
  return c;
}

Mat18 assemble_S(const SystemState& state) {
  Mat18 s = Mat18::Zero();
  block(s, kBodyRateBlock, kBodyRateBlock) = hat(state.body_rate);
  for (std::size_t i = 0; i < kWingCount; ++i) {
    block(s, wing_block(i), wing_block(i)) = hat(state.wing_rates[i]);
  }
  return s;
}

Mat18 assemble_D(const SystemState& state, const Morphology& morph) {
  Mat18 d = Mat18::Zero();
  const Mat3 ab = state.body_attitude.matrix();
  const Mat3 w_h = hat(state.body_rate);
  block(d, 3, 3) = w_h * morph.body_inertia;
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const WingTerms t = wing_terms(state, morph, i);
    const Eigen::Index k = wing_block(i);
    // Translational acceleration bias of the wing CoM (body frame) is
    // b_w Omega_B + b_o Omega_i.
    const Mat3 b_w = -w_h * t.r_h;
    const Mat3 b_o = -(2.0 * w_h * t.a + t.a * hat(t.omega)) * t.kap_h;
    const Mat3 spin_h = hat(t.spin);
    const Mat3 gyro_o = t.jbar * hat(t.q) + spin_h * t.jbar;

    block(d, 0, 3) += t.m * ab * b_w;
    block(d, 0, k) = t.m * ab * b_o;
    block(d, 3, 3) += t.m * t.r_h * b_w + t.a * spin_h * t.jbar * t.a.transpose();
    block(d, 3, k) = t.m * t.r_h * b_o + t.a * gyro_o;
    block(d, k, 3) = t.m * t.kap_h * t.a.transpose() * b_w + spin_h * t.jbar * t.a.transpose();
    block(d, k, k) = t.m * t.kap_h * t.a.transpose() * b_o + gyro_o;
  }
  return d;
}

Mat18 coupling_blocks(const SystemState& state, const Morphology& morph) {
  return assemble_D(state, morph) - assemble_S(state) * assemble_C(state, morph);
}

Mat18 reference_coupling_blocks(const SystemState& state, const Morphology& morph) {
  Mat18 n = Mat18::Zero();
  const Mat3 ab = state.body_attitude.matrix();
  const Vec3& w = state.body_rate;
  const Mat3 w_h = hat(w);
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const WingTerms t = wing_terms(state, morph, i);
    const Vec3& kappa = morph.wings[i].com_offset;
    const Eigen::Index k = wing_block(i);
    const Mat3 om_h = hat(t.omega);
    const Mat3 mu_rho = t.mu_h + t.rho_h;
    const Mat3 flap_h = hat(t.a * om_h * kappa);  // (A Omega^ kappa)^

    block(n, 0, 3) += -t.m * ab * w_h * mu_rho - t.m * ab * flap_h;
    block(n, 0, k) = -t.m * ab * (w_h * t.a + t.a * om_h) * t.kap_h;

    block(n, 3, 0) += -t.m * mu_rho * w_h * ab.transpose() +
                      t.m * (hat(t.mu_h * w) + hat(t.rho_h * w)) * ab.transpose();
    block(n, 3, 3) += t.a * om_h * t.j * t.a.transpose() - t.a * t.j * om_h * t.a.transpose() -
                      t.m * (t.mu_h * flap_h + flap_h * t.mu_h);
    block(n, 3, k) = t.a * om_h * t.j - t.m * t.mu_h * t.a * om_h * t.kap_h;

    block(n, k, 0) = -t.m * t.kap_h * (t.a.transpose() * w_h + om_h * t.a.transpose()) *
                         ab.transpose() +
                     t.m * t.kap_h * t.a * w_h * ab.transpose() +
                     t.m * hat(t.kap_h * t.omega) * t.a.transpose() * ab.transpose();
    block(n, k, 3) = -t.j * om_h * t.a.transpose() +
                     t.m * t.kap_h * om_h * t.a.transpose() * t.mu_h -
                     hat(t.j * t.a.transpose() * w) * t.a.transpose() -
                     t.m * t.kap_h * t.a.transpose() * (w_h * t.mu_h - hat(t.mu_h * w));
    block(n, k, k) = hat(t.a.transpose() * w).transpose() * t.j +
                     t.m * hat(t.a.transpose() * t.mu_h * w) * t.kap_h.transpose();
  }
  return n;
}

Vec18 coriolis_vector(const SystemState& state, const Morphology& morph) {
  Vec18 out = Vec18::Zero();
  const Mat3 ab = state.body_attitude.matrix();
  const Vec3& w = state.body_rate;
  out.segment<3>(3) = w.cross(morph.body_inertia * w);
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const WingTerms t = wing_terms(state, morph, i);
    const Vec3& kappa = morph.wings[i].com_offset;
    const Vec3 flap = t.omega.cross(kappa);  // Omega^ kappa
    const Vec3 beta = w.cross(w.cross(t.r)) + 2.0 * w.cross(t.a * flap) +
                      t.a * t.omega.cross(flap);
    const Vec3 gyro = t.jbar * t.q.cross(t.omega) + t.spin.cross(t.jbar * t.spin);
    out.segment<3>(0) += t.m * ab * beta;
    out.segment<3>(3) += t.m * t.r.cross(beta) + t.a * gyro;
    out.segment<3>(wing_block(i)) = t.m * kappa.cross(t.a.transpose() * beta) + gyro;
  }
  return out;
}

Vec18 gravity_forces(const SystemState& state, const Morphology& morph) {
  Vec18 out = Vec18::Zero();
  const Mat3 ab = state.body_attitude.matrix();
  const double g = morph.gravity;
  const Vec3 down_body = ab.transpose() * kE3;
  out.segment<3>(0) = morph.total_mass() * g * kE3;
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const WingTerms t = wing_terms(state, morph, i);
    out.segment<3>(3) += t.m * g * t.r.cross(down_body);
    out.segment<3>(wing_block(i)) =
        t.m * g * morph.wings[i].com_offset.cross(t.a.transpose() * down_body);
  }
  return out;
}

Vec18 aero_forces(const SystemState& state, const Morphology& morph,
                  const WingWrenches& wrenches) {
  Vec18 out = Vec18::Zero();
  const Mat3 ab = state.body_attitude.matrix();
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const Vec3 f_body = state.wing_attitudes[i].matrix() * wrenches[i].force();
    out.segment<3>(0) += ab * f_body;
    out.segment<3>(3) += morph.wings[i].joint_offset.cross(f_body);
    out.segment<3>(wing_block(i)) = wrenches[i].moment;
  }
  return out;
}

Vec18 control_forces(const SystemState& state, const Torques& torques) {
  Vec18 out = Vec18::Zero();
  for (std::size_t i = 0; i < kWingCount; ++i) {
    out.segment<3>(3) -= torques[i];
    out.segment<3>(wing_block(i)) = state.wing_attitudes[i].matrix().transpose() * torques[i];
  }
  return out;
}

Vec18 solve_mass_system(const Mat18& c, const Vec18& b) {
  if (!c.allFinite() || !b.allFinite()) throw SingularMass("mass system has non-finite entries");
  Vec18 scale;
  for (Eigen::Index k = 0; k < 18; ++k) {
    if (!(c(k, k) > 0.0)) {
      throw SingularMass("mass matrix diagonal entry " + std::to_string(k) + " is not positive");
    }
    scale(k) = 1.0 / std::sqrt(c(k, k));
  }
  const Mat18 cs = scale.asDiagonal() * c * scale.asDiagonal();
  Eigen::LLT<Mat18> llt(cs);
  if (llt.info() != Eigen::Success) {
    throw SingularMass("mass matrix is not positive definite");
  }
  const Vec18 bs = scale.cwiseProduct(b);
  Vec18 y = llt.solve(bs);
  y += llt.solve(bs - cs * y);
  return scale.cwiseProduct(y);
}

EomTerms eom_terms(const Vehicle& vehicle, const SystemState& state) {
  const Morphology& morph = vehicle.morphology();
  EomTerms t;
  t.mass = assemble_C(state, morph);
  t.coriolis = coriolis_vector(state, morph);
  t.gravity = gravity_forces(state, morph);
  t.wrenches = vehicle.wing_loads(state);
  t.aero = aero_forces(state, morph, t.wrenches);
  return t;
}

Vec18 eom_rhs(const Vehicle& vehicle, const SystemState& state, const Torques& torques) {
  const EomTerms t = eom_terms(vehicle, state);
  return solve_mass_system(t.mass, t.aero + control_forces(state, torques) + t.gravity -
                                       t.coriolis);
}

Torques zero_torques() { return Torques{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()}; }

namespace {

// Attitude increments u_B, u_1..u_4 (rotation vectors) stacked like xi's
// angular blocks; the translational slot holds the position increment.
using Increment = Vec18;

SystemState displaced(const SystemState& base, const Increment& du, const Vec18& xi, double t) {
  SystemState s = base;
  s.t = t;
  s.position = base.position + du.segment<3>(0);
  s.body_attitude = base.body_attitude * exp_so3(Vec3(du.segment<3>(3)));
  for (std::size_t i = 0; i < kWingCount; ++i) {
    s.wing_attitudes[i] = base.wing_attitudes[i] * exp_so3(Vec3(du.segment<3>(wing_block(i))));
  }
  s.set_xi(xi);
  return s;
}

// Time derivative of the increment: position rate plus dexp^{-1}(u) Omega.
Increment increment_rate(const Increment& du, const Vec18& xi) {
  Increment r;
  r.segment<3>(0) = xi.segment<3>(0);
  r.segment<3>(3) = dexp_inv(du.segment<3>(3)) * xi.segment<3>(3);
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const Eigen::Index k = wing_block(i);
    r.segment<3>(k) = dexp_inv(du.segment<3>(k)) * xi.segment<3>(k);
  }
  return r;
}

}  // namespace

SystemState step(const Vehicle& vehicle, const SystemState& state, const TorqueLaw& torque,
                 double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const auto accel = [&](const SystemState& s) {
    if (!s.all_finite()) {
      throw NonFiniteState("state became non-finite at t = " + std::to_string(s.t) + " s", s.t);
    }
    const Torques tau = torque ? torque(s) : zero_torques();
    for (const Vec3& ti : tau) {
      if (!ti.allFinite()) {
        throw NonFiniteState("joint torque became non-finite at t = " + std::to_string(s.t) + " s",
                             s.t);
      }
    }
    const Vec18 a = eom_rhs(vehicle, s, tau);
    if (!a.allFinite()) {
      throw NonFiniteState("acceleration became non-finite at t = " + std::to_string(s.t) + " s",
                           s.t);
    }
    return a;
  };
  const Vec18 xi0 = state.xi();
  const Increment zero = Increment::Zero();

  const Vec18 a1 = accel(state);
  const Increment d1 = increment_rate(zero, xi0);

  const Increment u2 = 0.5 * dt * d1;
  const Vec18 xi2 = xi0 + 0.5 * dt * a1;
  const SystemState s2 = displaced(state, u2, xi2, state.t + 0.5 * dt);
  const Vec18 a2 = accel(s2);
  const Increment d2 = increment_rate(u2, xi2);

  const Increment u3 = 0.5 * dt * d2;
  const Vec18 xi3 = xi0 + 0.5 * dt * a2;
  const SystemState s3 = displaced(state, u3, xi3, state.t + 0.5 * dt);
  const Vec18 a3 = accel(s3);
  const Increment d3 = increment_rate(u3, xi3);

  const Increment u4 = dt * d3;
  const Vec18 xi4 = xi0 + dt * a3;
  const SystemState s4 = displaced(state, u4, xi4, state.t + dt);
  const Vec18 a4 = accel(s4);
  const Increment d4 = increment_rate(u4, xi4);

  const Increment u = dt / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
  const Vec18 xi = xi0 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  if (!u.allFinite() || !xi.allFinite()) {
    throw NonFiniteState("state became non-finite during step at t = " +
                             std::to_string(state.t + dt) + " s",
                         state.t + dt);
  }
  return displaced(state, u, xi, state.t + dt);
}

double potential_energy(const SystemState& state, const Morphology& morph) {
  const Mat3 ab = state.body_attitude.matrix();
  const double g = morph.gravity;
  double u = -morph.body_mass * g * state.position.z();
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const WingBody& w = morph.wings[i];
    const Vec3 com = state.position +
                     ab * (w.joint_offset + state.wing_attitudes[i].matrix() * w.com_offset);
    u -= w.mass * g * com.z();
  }
  return u;
}

Diagnostics diagnostics(const SystemState& state, const Morphology& morph) {
  const Mat18 c = assemble_C(state, morph);
  const Vec18 xi = state.xi();
  const Vec18 p = c * xi;
  Diagnostics d;
  d.kinetic = 0.5 * xi.dot(p);
  d.potential = potential_energy(state, morph);
  d.total = d.kinetic + d.potential;
  d.linear_momentum = p.segment<3>(0);
  return d;
}

}  // namespace ornithopter

#include "ornithopter/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "ornithopter/errors.hpp"
#include "ornithopter/io.hpp"
#include "ornithopter/optimization.hpp"

namespace ornithopter {

namespace {

constexpr double kPi = std::numbers::pi;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

CheckResult make(std::string id, std::string name, double measured, double threshold, bool ok,
                 const Stopwatch& sw, std::string detail = {}, bool gating = true) {
  CheckResult r;
  r.id = std::move(id);
  r.name = std::move(name);
  r.measured = measured;
  r.threshold = threshold;
  r.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
  r.gating = gating;
  r.runtime = sw.seconds();
  r.detail = std::move(detail);
  return r;
}

CheckResult failed(std::string id, std::string name, double threshold, const Stopwatch& sw,
                   const std::exception& e) {
  return make(std::move(id), std::move(name), std::nan(""), threshold, false, sw,
              std::string("error: ") + e.what());
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

Morphology without_gravity(Morphology m) {
  m.gravity = 0.0;
  return m;
}

AeroModel vacuum() {
  AeroModel a;
  a.rho = 0.0;
  return a;
}

double period_of(const KinematicsParams& kin) { return 1.0 / kin.frequency(); }

BodyState hover_start(const Vec3& p = Vec3(0.0, 0.0, 2.0)) {
  BodyState b;
  b.position = p;
  return b;
}

SystemState state_at_rest_with_wings(const KinematicsParams& kin, double t) {
  BodyState body = hover_start();
  body.t = t;
  SystemState s = compose_state(body, sample_wings(kin, t));
  for (auto& w : s.wing_rates) w.setZero();
  return s;
}

double measured_order(double coarse, double fine) { return std::log2(coarse / fine); }

// Applies g exp(t xi) to every factor of the configuration.
SystemState flow(const SystemState& s, double t) {
  SystemState out = s;
  out.position = s.position + t * s.velocity;
  out.body_attitude = s.body_attitude * exp_so3(t * s.body_rate);
  for (std::size_t i = 0; i < kWingCount; ++i) {
    out.wing_attitudes[i] = s.wing_attitudes[i] * exp_so3(t * s.wing_rates[i]);
  }
  return out;
}

// Moves one coordinate of the configuration: k in [0, 3) translates p,
// k in [3, 18) rotates block (k / 3 - 1) by exp(eps e_(k % 3)) on the right.
SystemState perturb(const SystemState& s, Eigen::Index k, double eps) {
  SystemState out = s;
  if (k < 3) {
    out.position(k) += eps;
    return out;
  }
  Vec3 axis = Vec3::Zero();
  axis(k % 3) = eps;
  const Eigen::Index block = k / 3 - 1;
  if (block == 0) {
    out.body_attitude = s.body_attitude * exp_so3(axis);
  } else {
    const auto i = static_cast<std::size_t>(block - 1);
    out.wing_attitudes[i] = s.wing_attitudes[i] * exp_so3(axis);
  }
  return out;
}

double lagrangian(const SystemState& s, const Morphology& morph) {
  const Vec18 xi = s.xi();
  return 0.5 * xi.dot(assemble_C(s, morph) * xi) - potential_energy(s, morph);
}

}  // namespace

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Warn: return "WARN";
    default: return "FAIL";
  }
}

bool ValidationReport::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) {
    return c.gating && c.status == CheckStatus::Fail;
  });
}

std::string ValidationReport::text() const {
  std::ostringstream out;
  char line[512];
  std::snprintf(line, sizeof line, "%-22s %-6s %14s %14s %9s  %s\n", "check", "status", "measured",
                "threshold", "time[s]", "description");
  out << line;
  for (const auto& c : checks) {
    const std::string status = c.gating ? to_string(c.status) : "INFO";
    std::snprintf(line, sizeof line, "%-22s %-6s %14.6g %14.6g %9.2f  %s\n", c.id.c_str(),
                  status.c_str(), c.measured, c.threshold, c.runtime, c.name.c_str());
    out << line;
    if (!c.detail.empty()) out << std::string(23, ' ') << c.detail << "\n";
  }
  out << (passed() ? "all gating checks passed\n" : "some gating checks FAILED\n");
  return out.str();
}

std::string ValidationReport::csv() const {
  std::ostringstream out;
  out << "id,status,gating,measured,threshold,runtime [s],description,detail\n";
  const auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  for (const auto& c : checks) {
    out << c.id << ',' << to_string(c.status) << ',' << (c.gating ? 1 : 0) << ','
        << format_number(c.measured) << ',' << format_number(c.threshold) << ','
        << format_number(c.runtime) << ',' << quote(c.name) << ',' << quote(c.detail) << '\n';
  }
  return out.str();
}

ValidationOptions ValidationOptions::quick() {
  ValidationOptions o;
  o.mass_matrix_samples = 100;
  o.lemma_samples = 8;
  o.variational_samples = 4;
  o.energy_duration = 0.002;
  o.free_fall_steps = 500;
  o.momentum_duration = 0.002;
  o.kinematics_samples = 16;
  o.quadrature_states = 5;
  o.equivalence_periods = 0.02;
  o.closure_periods = 0.2;
  o.hover_periods = 0.5;
  o.hover_dt = 5e-5;
  o.ga_generations = 200;
  return o;
}

Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  Vec3 axis;
  do {
    axis = Vec3(normal(rng), normal(rng), normal(rng));
  } while (axis.norm() < 1e-12);
  return exp_so3(axis, angle(rng));
}

SystemState random_state(std::mt19937_64& rng, const RandomStateRanges& ranges) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto vec = [&](double scale) -> Vec3 { return Vec3(unit(rng), unit(rng), unit(rng)) * scale; };
  SystemState s;
  s.position = vec(ranges.position);
  s.body_attitude = random_rotation(rng);
  for (auto& a : s.wing_attitudes) a = random_rotation(rng);
  s.velocity = vec(ranges.velocity);
  s.body_rate = vec(ranges.body_rate);
  for (auto& w : s.wing_rates) w = vec(ranges.wing_rate);
  return s;
}

double kinetic_energy_bodies(const SystemState& s, const Morphology& morph) {
  const Mat3 ab = s.body_attitude.matrix();
  double t = 0.5 * morph.body_mass * s.velocity.squaredNorm() +
             0.5 * s.body_rate.dot(morph.body_inertia * s.body_rate);
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const WingBody& w = morph.wings[i];
    const Mat3 a = s.wing_attitudes[i].matrix();
    // CoM velocity from the rigid-body velocity of each link in turn.
    const Vec3 rel = w.joint_offset + a * w.com_offset;
    const Vec3 v_com = s.velocity + ab * (s.body_rate.cross(rel) + a * s.wing_rates[i].cross(w.com_offset));
    const Vec3 omega = a.transpose() * s.body_rate + s.wing_rates[i];
    const Mat3 k = hat(w.com_offset);
    const Mat3 j_com = w.inertia + w.mass * k * k;
    t += 0.5 * w.mass * v_com.squaredNorm() + 0.5 * omega.dot(j_com * omega);
  }
  return t;
}

CheckResult check_mass_ratio(const Morphology& morph) {
  Stopwatch sw;
  const double pct = 100.0 * morph.wings[0].mass / morph.body_mass;
  const double rounded = std::round(pct * 100.0) / 100.0;
  return make("mass_ratio", "fore-wing to body mass ratio rounds to 3.50 %", pct, 3.50,
              std::abs(rounded - 3.50) < 1e-12, sw,
              fmt("m_1/m_B = %.6f %%; total mass %.6g kg", pct, morph.total_mass()));
}

CheckResult check_energy(const Morphology& morph, const KinematicsParams& kin,
                         const ValidationOptions& opt) {
  Stopwatch sw;
  const std::string id = "energy";
  const std::string name = "energy drift in vacuum with tau = 0";
  try {
    std::mt19937_64 rng(opt.seed);
    const Vehicle vehicle(morph, vacuum());
    SystemState s = random_state(rng, {0.5, 5.0, 50.0, 0.0});
    const SystemState wings = state_at_rest_with_wings(kin, 0.0);
    s.position = wings.position;
    s.body_attitude = Rotation();
    s.wing_attitudes = wings.wing_attitudes;
    const Diagnostics d0 = diagnostics(s, morph);
    const auto steps = static_cast<long>(std::llround(opt.energy_duration / opt.energy_dt));
    double worst = 0.0;
    for (long n = 0; n < steps; ++n) {
      s = step(vehicle, s, nullptr, opt.energy_dt);
      if (n % 100 == 99 || n + 1 == steps) {
        worst = std::max(worst, std::abs(diagnostics(s, morph).total - d0.total));
      }
    }
    const double rel = worst / std::abs(d0.total);
    return make(id, name, rel, 1e-6, rel < 1e-6, sw,
                fmt("max |dE| = %.3g J over %.3g s; relative to T0: %.3g", worst,
                    opt.energy_duration, worst / d0.kinetic));
  } catch (const std::exception& e) {
    return failed(id, name, 1e-6, sw, e);
  }
}

CheckResult check_free_fall(const Morphology& morph, const KinematicsParams& kin,
                            const ValidationOptions& opt) {
  Stopwatch sw;
  const std::string id = "free_fall";
  const std::string name = "free fall from rest: v_dot = g e3, all Omega_dot = 0";
  try {
    const Vehicle vehicle(morph, vacuum());
    SystemState s = state_at_rest_with_wings(kin, 0.0);
    double worst_v = 0.0, worst_w = 0.0;
    for (int n = 0; n <= opt.free_fall_steps; ++n) {
      const Vec18 a = eom_rhs(vehicle, s, zero_torques());
      worst_v = std::max(worst_v, (a.head<3>() - morph.gravity * kE3).norm());
      for (Eigen::Index b = 3; b < 18; b += 3) worst_w = std::max(worst_w, a.segment<3>(b).norm());
      if (n < opt.free_fall_steps) s = step(vehicle, s, nullptr, opt.free_fall_dt);
    }
    const double worst = std::max(worst_v, worst_w);
    return make(id, name, worst, 1e-9, worst < 1e-9, sw,
                fmt("max |v_dot - g e3| = %.3g m/s^2, max |Omega_dot| = %.3g rad/s^2 over %.0f steps",
                    worst_v, worst_w, opt.free_fall_steps));
  } catch (const std::exception& e) {
    return failed(id, name, 1e-9, sw, e);
  }
}

CheckResult check_momentum(const Morphology& morph, const ValidationOptions& opt) {
  Stopwatch sw;
  const std::string id = "momentum";
  const std::string name = "linear momentum with no gravity, no air, tau = 0";
  try {
    std::mt19937_64 rng(opt.seed + 1);
    const Morphology m = without_gravity(morph);
    const Vehicle vehicle(m, vacuum());
    SystemState s = random_state(rng);
    const Vec3 p0 = diagnostics(s, m).linear_momentum;
    const auto steps = static_cast<long>(std::llround(opt.momentum_duration / opt.momentum_dt));
    double worst = 0.0;
    for (long n = 0; n < steps; ++n) {
      s = step(vehicle, s, nullptr, opt.momentum_dt);
      if (n % 100 == 99 || n + 1 == steps) {
        worst = std::max(worst, (diagnostics(s, m).linear_momentum - p0).norm());
      }
    }
    const double rel = worst / p0.norm();
    return make(id, name, rel, 1e-8, rel < 1e-8, sw,
                fmt("|P0| = %.4g kg m/s, max |P - P0| = %.3g", p0.norm(), worst));
  } catch (const std::exception& e) {
    return failed(id, name, 1e-8, sw, e);
  }
}

CheckResult check_mass_matrix(const Morphology& morph, const ValidationOptions& opt) {
  Stopwatch sw;
  std::mt19937_64 rng(opt.seed + 2);
  double worst_sym = 0.0, min_eig = std::numeric_limits<double>::infinity(), worst_t = 0.0;
  double max_cond = 0.0;
  for (int k = 0; k < opt.mass_matrix_samples; ++k) {
    const SystemState s = random_state(rng);
    const Mat18 c = assemble_C(s, morph);
    const double norm = c.cwiseAbs().rowwise().sum().maxCoeff();
    worst_sym = std::max(worst_sym, (c - c.transpose()).cwiseAbs().rowwise().sum().maxCoeff() / norm);
    const Eigen::SelfAdjointEigenSolver<Mat18> eig(c, Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, eig.eigenvalues()(0));
    max_cond = std::max(max_cond, eig.eigenvalues()(17) / eig.eigenvalues()(0));
    const Vec18 xi = s.xi();
    const double t_oracle = kinetic_energy_bodies(s, morph);
    worst_t = std::max(worst_t, std::abs(0.5 * xi.dot(c * xi) - t_oracle) / t_oracle);
  }
  const bool ok = worst_sym <= 1e-12 && min_eig > 0.0 && worst_t <= 1e-12;
  return make("mass_matrix", "C symmetric, positive definite, T = xi^T C xi / 2", worst_t, 1e-12,
              ok, sw,
              fmt("asymmetry %.3g, min eigenvalue %.3g, ", worst_sym, min_eig) +
                  fmt("max condition %.3g over %.0f states", max_cond, opt.mass_matrix_samples));
}

CheckResult check_kinematics(const KinematicsParams& kin, const ValidationOptions& opt) {
  Stopwatch sw;
  const double period = period_of(kin);
  const double h = period / 128.0;
  double e_rate[2] = {0.0, 0.0}, e_acc[2] = {0.0, 0.0};
  for (int k = 0; k < opt.kinematics_samples; ++k) {
    const double t = (k + 0.37) * period / opt.kinematics_samples;
    for (std::size_t i = 0; i < kWingCount; ++i) {
      const WingWaveform& w = kin.wings[i];
      const Vec3 omega = wing_angular_velocity(w, i, t);
      const Vec3 omega_dot = wing_angular_acceleration(w, i, t);
      const Mat3 a = wing_attitude(w, i, t).matrix();
      for (int level = 0; level < 2; ++level) {
        const double hh = level == 0 ? h : 0.5 * h;
        const Mat3 a_dot =
            (wing_attitude(w, i, t + hh).matrix() - wing_attitude(w, i, t - hh).matrix()) / (2 * hh);
        e_rate[level] += (hat(omega) - a.transpose() * a_dot).norm();
        e_acc[level] += (omega_dot - (wing_angular_velocity(w, i, t + hh) -
                                      wing_angular_velocity(w, i, t - hh)) / (2 * hh))
                            .norm();
      }
    }
  }
  const double order_rate = measured_order(e_rate[0], e_rate[1]);
  const double order_acc = measured_order(e_acc[0], e_acc[1]);
  const bool ok = order_rate >= 1.9 && order_rate <= 2.1 && order_acc >= 1.9 && order_acc <= 2.1;
  const double worst = std::abs(order_rate - 2.0) > std::abs(order_acc - 2.0) ? order_rate : order_acc;
  return make("kinematics", "finite-difference order of Omega_i and Omega_i dot", worst, 2.0, ok,
              sw,
              fmt("order(Omega^ vs A^T A_dot) = %.4f, order(Omega_dot) = %.4f, h = %.3g s",
                  order_rate, order_acc, h));
}

CheckResult check_quadrature(const Morphology& morph, const AeroModel& aero,
                             const KinematicsParams& kin, const ValidationOptions& opt) {
  Stopwatch sw;
  AeroModel coarse = aero, fine = aero;
  coarse.stations = 200;
  fine.stations = 400;
  if (coarse.rho == 0.0) coarse.rho = fine.rho = 1.2;
  const Vehicle vc(morph, coarse), vf(morph, fine);
  const double period = period_of(kin);
  double worst = 0.0;
  for (int k = 0; k < opt.quadrature_states; ++k) {
    BodyState body = hover_start();
    body.t = (k + 0.5) * period / opt.quadrature_states;
    const SystemState s = compose_state(body, sample_wings(kin, body.t));
    const WingWrenches a = vc.wing_loads(s), b = vf.wing_loads(s);
    Vec12 fa, fb, ma, mb;
    for (std::size_t i = 0; i < kWingCount; ++i) {
      const auto seg = 3 * static_cast<Eigen::Index>(i);
      fa.segment<3>(seg) = a[i].force();
      fb.segment<3>(seg) = b[i].force();
      ma.segment<3>(seg) = a[i].moment;
      mb.segment<3>(seg) = b[i].moment;
    }
    worst = std::max({worst, (fa - fb).norm() / fb.norm(), (ma - mb).norm() / mb.norm()});
  }
  return make("quadrature", "wing loads change between 200 and 400 stations", worst, 1e-3,
              worst < 1e-3, sw,
              fmt("max relative change over %.0f states of one period", opt.quadrature_states));
}

namespace {

struct EquivalenceRun {
  double dp = 0.0, da = 0.0, dw = 0.0;
  long steps = 0;
  double final_rate = 0.0;
};

// Integrates the reduced model and the full model side by side.
// `open_loop` feeds the torques recovered along the reduced trajectory;
// otherwise the full model uses the tracking law at its own state.
EquivalenceRun run_equivalence(const Vehicle& vehicle, const KinematicsParams& kin,
                               const ValidationOptions& opt, bool open_loop) {
  BodyState body = hover_start();
  SystemState full = compose_state(body, sample_wings(kin, 0.0));
  const TorqueLaw feedforward = [&](const SystemState& x) {
    const ReducedTerms t = reduced_terms(vehicle, body_part(x), kin);
    return recover_torques(t, solve_reduced(t));
  };
  const TorqueLaw law = open_loop ? feedforward : tracking_torque_law(vehicle, kin);
  EquivalenceRun r;
  const double duration = opt.equivalence_periods * period_of(kin);
  r.steps = static_cast<long>(std::llround(duration / opt.equivalence_dt));
  for (long n = 0; n < r.steps; ++n) {
    body = step_reduced(vehicle, body, kin, opt.equivalence_dt);
    full = step(vehicle, full, law, opt.equivalence_dt);
    r.dp = std::max(r.dp, (full.position - body.position).norm() / body.position.norm());
    r.da = std::max(r.da, (full.body_attitude.matrix() - body.attitude.matrix()).cwiseAbs().maxCoeff());
    if (n % 50 == 49 || n + 1 == r.steps) {
      const WingSamples desired = sample_wings(kin, full.t);
      for (std::size_t i = 0; i < kWingCount; ++i) {
        r.dw = std::max(r.dw, (full.wing_attitudes[i].matrix() - desired[i].attitude.matrix())
                                  .cwiseAbs()
                                  .maxCoeff());
      }
    }
  }
  r.final_rate = body.body_rate.norm();
  return r;
}

}  // namespace

CheckResult check_equivalence(const Morphology& morph, const AeroModel& aero,
                              const KinematicsParams& kin, const ValidationOptions& opt) {
  Stopwatch sw;
  const std::string id = "reduced_full";
  const std::string name = "reduced model vs full model driven by recovered torques";
  try {
    const Vehicle vehicle(morph, aero);
    const EquivalenceRun r = run_equivalence(vehicle, kin, opt, false);
    const double worst = std::max(r.dp, r.da);
    return make(id, name, worst, 1e-6, worst < 1e-6, sw,
                fmt("relative |dp| = %.3g, |dA_B|inf = %.3g, wing tracking |A_i - A_i^d|inf = %.3g",
                    r.dp, r.da, r.dw) +
                    fmt("; %.0f steps, final |Omega_B| = %.4g rad/s", static_cast<double>(r.steps),
                        r.final_rate));
  } catch (const std::exception& e) {
    return failed(id, name, 1e-6, sw, e);
  }
}

CheckResult check_equivalence_open_loop(const Morphology& morph, const AeroModel& aero,
                                        const KinematicsParams& kin, const ValidationOptions& opt) {
  Stopwatch sw;
  const std::string id = "reduced_full_open";
  const std::string name = "same comparison with torques fed open loop from the reduced run";
  try {
    const Vehicle vehicle(morph, aero);
    const EquivalenceRun r = run_equivalence(vehicle, kin, opt, true);
    return make(id, name, std::max(r.dp, r.da), 1e-6, true, sw,
                fmt("relative |dp| = %.3g, |dA_B|inf = %.3g, wing drift |A_i - A_i^d|inf = %.3g",
                    r.dp, r.da, r.dw),
                /*gating=*/false);
  } catch (const std::exception& e) {
    CheckResult c = failed(id, name, 1e-6, sw, e);
    c.gating = false;
    return c;
  }
}

CheckResult check_closure(const Morphology& morph, const AeroModel& aero,
                          const KinematicsParams& kin, const ValidationOptions& opt,
                          CheckResult* scaled) {
  Stopwatch sw;
  const std::string id = "closure";
  const std::string name = "force decomposition closes the body equations";
  try {
    const Vehicle vehicle(morph, aero);
    BodyState body = hover_start();
    const double duration = opt.closure_periods * period_of(kin);
    const auto steps = static_cast<long>(std::llround(duration / opt.closure_dt));
    double trans = 0.0, rot = 0.0, trans_s = 0.0, rot_s = 0.0;
    const double m = morph.total_mass();
    for (long n = 0; n <= steps; ++n) {
      Vec6 accel;
      const ForceDecomposition d = decompose_forces(vehicle, body, kin, &accel);
      const ClosureResidual r = closure_residual(morph, body, d, accel);
      trans = std::max(trans, r.translational);
      rot = std::max(rot, r.rotational);
      const double t_scale = m * accel.head<3>().norm() + m * morph.gravity + d.f_c.norm() +
                             d.f_b.norm() + d.f_w.norm();
      const Vec3 jw = morph.body_inertia * accel.tail<3>();
      const double r_scale = jw.norm() + body.body_rate.cross(morph.body_inertia * body.body_rate).norm() +
                             d.gamma_c.norm() + d.gamma_b.norm() + d.gamma_w.norm();
      trans_s = std::max(trans_s, r.translational * std::max(1.0, m * accel.head<3>().norm()) / t_scale);
      rot_s = std::max(rot_s, r.rotational * std::max(1.0, jw.norm()) / r_scale);
      if (n < steps) body = step_reduced(vehicle, body, kin, opt.closure_dt);
    }
    if (scaled) {
      const double worst = std::max(trans_s, rot_s);
      *scaled = make("closure_scaled", "closure residual relative to the sum of term magnitudes",
                     worst, 1e-8, worst <= 1e-8, sw,
                     fmt("translational %.3g, rotational %.3g", trans_s, rot_s));
    }
    const double worst = std::max(trans, rot);
    return make(id, name, worst, 1e-8, worst <= 1e-8, sw,
                fmt("translational %.3g, rotational %.3g over %.0f steps", trans, rot,
                    static_cast<double>(steps)));
  } catch (const std::exception& e) {
    if (scaled) *scaled = failed("closure_scaled", "closure residual relative to term magnitudes", 1e-8, sw, e);
    return failed(id, name, 1e-8, sw, e);
  }
}

CheckResult check_force_ordering(const Morphology& morph, const AeroModel& aero,
                                 const KinematicsParams& kin, const BodyPitch& pitch,
                                 const ValidationOptions& opt) {
  Stopwatch sw;
  const std::string id = "force_ordering";
  const std::string name = "mean |F_B| < 0.2 mean |F_w| on the hover run";
  try {
    const Vehicle vehicle(morph, aero);
    const PrescribedRun run =
        prescribed_body_sim(vehicle, kin, pitch, Vec3(0.0, 0.0, 2.0), Vec3::Zero(),
                            opt.hover_periods * period_of(kin), opt.hover_dt, 1);
    if (run.diverged) throw NonFiniteState("hover run diverged", run.diverged_at);
    // Time averages by the trapezoid rule on the uniform grid.
    double fb = 0.0, fw = 0.0, fc = 0.0, total = 0.0;
    for (std::size_t k = 0; k < run.samples.size(); ++k) {
      const double wgt = (k == 0 || k + 1 == run.samples.size()) ? 0.5 : 1.0;
      fb += wgt * run.samples[k].forces.f_b.norm();
      fw += wgt * run.samples[k].forces.f_w.norm();
      fc += wgt * run.samples[k].forces.f_c.norm();
      total += wgt;
    }
    fb /= total;
    fw /= total;
    fc /= total;
    const double ratio = fb / fw;
    return make(id, name, ratio, 0.2, ratio < 0.2, sw,
                fmt("mean |F_B| = %.4g N, mean |F_w| = %.4g N, mean |F_c| = %.4g N", fb, fw, fc));
  } catch (const std::exception& e) {
    return failed(id, name, 0.2, sw, e);
  }
}

CheckResult check_ga(const ValidationOptions& opt) {
  Stopwatch sw;
  const Bounds bounds = hover_bounds();
  ParameterVector target(bounds.size());
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    const double frac = 0.3 + 0.4 * static_cast<double>(k) / static_cast<double>(bounds.size());
    target[k] = bounds.lower[k] + frac * (bounds.upper[k] - bounds.lower[k]);
  }
  const CostFunction cost = [&](const ParameterVector& x) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - target[k]) * (x[k] - target[k]);
    return s;
  };
  GAConfig cfg;
  cfg.generations = opt.ga_generations;
  cfg.seed = opt.seed;
  const GAResult a = ga_optimize(cfg, bounds, cost);
  const GAResult b = ga_optimize(cfg, bounds, cost);
  bool identical = a.best == b.best && a.history.size() == b.history.size();
  for (std::size_t k = 0; identical && k < a.history.size(); ++k) {
    identical = a.history[k].best == b.history[k].best && a.history[k].mean == b.history[k].mean &&
                a.history[k].worst == b.history[k].worst;
  }
  const double ratio = a.best_cost / a.history.front().best;
  return make("ga", "GA on a convex test function, seed-deterministic", ratio, 1e-3,
              ratio < 1e-3 && identical, sw,
              fmt("initial best %.4g, final best %.4g, ", a.history.front().best, a.best_cost) +
                  (identical ? "two runs bit-identical" : "runs DIFFER"));
}

CheckResult check_hover(const Morphology& morph, const AeroModel& aero,
                        const KinematicsParams& kin, const BodyPitch& pitch, const GAConfig& ga,
                        const ValidationOptions& opt) {
  Stopwatch sw;
  GAConfig cfg = ga;
  cfg.horizon_periods = opt.hover_periods;
  cfg.dt = opt.hover_dt;
  cfg.cost_model = CostModel::Prescribed;
  const Vehicle vehicle(morph, aero);
  const HoverCost h = evaluate_hover(kin, pitch, vehicle, cfg);
  return make("hover", "hover diagnostic: excursion from p_ref over the horizon",
              h.max_excursion, 0.0, true, sw,
              fmt("hover_cost = %.6g (position %.4g, velocity %.4g)", h.cost, h.position_term,
                  h.velocity_term) +
                  (h.diverged ? ", DIVERGED" : ""),
              /*gating=*/false);
}

CheckResult check_lemma1(const Morphology& morph, const ValidationOptions& opt) {
  Stopwatch sw;
  std::mt19937_64 rng(opt.seed + 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h = 1e-4;
  double err[2] = {0.0, 0.0}, worst_rel = 0.0;
  for (int k = 0; k < opt.lemma_samples; ++k) {
    const SystemState s = random_state(rng);
    const auto wing = static_cast<std::size_t>(unit(rng) * kWingCount) % kWingCount;
    const WingShape& shape = morph.wings[wing].shape;
    const double r = (0.05 + 0.9 * unit(rng)) * shape.span_length;
    const double gamma = unit(rng);
    const Vec3 nu = chord_point(shape, r, gamma);
    const Vec3 w = chord_point_velocity(s, morph, wing, r, gamma);
    const auto position = [&](const SystemState& g) {
      return Vec3(g.position + g.body_attitude.matrix() *
                                   (morph.wings[wing].joint_offset + g.wing_attitudes[wing].matrix() * nu));
    };
    const Mat3 frame = (s.body_attitude.matrix() * s.wing_attitudes[wing].matrix()).transpose();
    for (int level = 0; level < 2; ++level) {
      const double hh = level == 0 ? h : 0.5 * h;
      const Vec3 fd = frame * (position(flow(s, hh)) - position(flow(s, -hh))) / (2 * hh);
      const double e = (w - fd).norm() / w.norm();
      err[level] += e;
      if (level == 1) worst_rel = std::max(worst_rel, e);
    }
  }
  const double order = measured_order(err[0], err[1]);
  const bool ok = (order >= 1.8 && order <= 2.2) || worst_rel < 1e-9;
  return make("lemma1_fd", "chord-point velocity vs finite difference of the inertial point", order,
              2.0, ok, sw, fmt("measured order %.4f, max relative error %.3g at h = %.3g s", order,
                               worst_rel, 0.5 * h));
}

CheckResult check_variational(const Morphology& morph, const ValidationOptions& opt) {
  Stopwatch sw;
  std::mt19937_64 rng(opt.seed + 4);
  const Vehicle vehicle(morph, vacuum());
  const double h = 1e-4;
  double err[2] = {0.0, 0.0}, worst_rel = 0.0;
  for (int k = 0; k < opt.variational_samples; ++k) {
    const SystemState s = random_state(rng, {1.0, 10.0, 100.0, 1.0});
    const Vec18 xi = s.xi();
    const Vec18 accel = eom_rhs(vehicle, s, zero_torques());
    const Mat18 c = assemble_C(s, morph);
    const Vec18 pi = c * xi;
    Vec18 ad = Vec18::Zero();
    for (Eigen::Index b = 3; b < 18; b += 3) ad.segment<3>(b) = xi.segment<3>(b).cross(pi.segment<3>(b));
    for (int level = 0; level < 2; ++level) {
      const double hh = level == 0 ? h : 0.5 * h;
      const Mat18 c_dot = (assemble_C(flow(s, hh), morph) - assemble_C(flow(s, -hh), morph)) / (2 * hh);
      Vec18 grad;
      for (Eigen::Index j = 0; j < 18; ++j) {
        grad(j) = (lagrangian(perturb(s, j, hh), morph) - lagrangian(perturb(s, j, -hh), morph)) /
                  (2 * hh);
      }
      const Vec18 residual = c_dot * xi + c * accel + ad - grad;
      const double scale = std::max({(c * accel).norm(), ad.norm(), grad.norm(), (c_dot * xi).norm()});
      const double e = residual.norm() / scale;
      err[level] += e;
      if (level == 1) worst_rel = std::max(worst_rel, e);
    }
  }
  const double order = measured_order(err[0], err[1]);
  const bool ok = (order >= 1.8 && order <= 2.2) || worst_rel < 1e-9;
  return make("variational_fd", "Euler-Poincare residual from finite differences of L", order, 2.0,
              ok, sw, fmt("measured order %.4f, max relative residual %.3g at h = %.3g", order,
                          worst_rel, 0.5 * h));
}

CheckResult check_reduced_closed_form(const Morphology& morph, const AeroModel& aero,
                                      const KinematicsParams& kin, const ValidationOptions& opt) {
  Stopwatch sw;
  std::mt19937_64 rng(opt.seed + 5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const Vehicle vehicle(morph, aero);
  double mass = 0.0, derived = 0.0, reference = 0.0;
  for (int k = 0; k < 16; ++k) {
    BodyState body;
    body.t = (k + 0.25) * period_of(kin) / 16.0;
    body.position = Vec3(0.0, 0.0, 2.0);
    body.attitude = random_rotation(rng);
    body.velocity = Vec3(unit(rng), unit(rng), unit(rng));
    body.body_rate = 10.0 * Vec3(unit(rng), unit(rng), unit(rng));
    const ReducedCrossCheck c = reduced_cross_check(vehicle, body, kin);
    mass = std::max(mass, c.mass_mismatch);
    derived = std::max(derived, c.derived_mismatch);
    reference = std::max(reference, c.reference_mismatch);
  }
  CheckResult r = make("reduced_closed_form", "closed-form reduced equation vs block elimination",
                       std::max(mass, derived), 1e-10, mass <= 1e-12 && derived <= 1e-10, sw,
                       fmt("mass %.3g, derived N %.3g, reference N %.3g", mass, derived, reference));
  if (r.status == CheckStatus::Pass && reference > 1e-10) r.status = CheckStatus::Warn;
  return r;
}

ValidationReport run_all(const RunConfig& config, const ValidationOptions& opt) {
  const Morphology& m = config.morphology;
  const AeroModel& a = config.aero;
  const KinematicsParams& k = config.kinematics;
  ValidationReport report;
  auto& c = report.checks;
  c.push_back(check_mass_ratio(m));
  c.push_back(check_energy(m, k, opt));
  c.push_back(check_free_fall(m, k, opt));
  c.push_back(check_momentum(m, opt));
  c.push_back(check_mass_matrix(m, opt));
  c.push_back(check_kinematics(k, opt));
  c.push_back(check_quadrature(m, a, k, opt));
  c.push_back(check_equivalence(m, a, k, opt));
  CheckResult scaled;
  c.push_back(check_closure(m, a, k, opt, &scaled));
  c.push_back(check_force_ordering(m, a, k, config.body_pitch, opt));
  c.push_back(check_ga(opt));
  c.push_back(check_hover(m, a, k, config.body_pitch, config.optimization, opt));
  c.push_back(scaled);
  c.push_back(check_lemma1(m, opt));
  c.push_back(check_variational(m, opt));
  c.push_back(check_reduced_closed_form(m, a, k, opt));
  c.push_back(check_equivalence_open_loop(m, a, k, opt));
  return report;
}

}  // namespace ornithopter

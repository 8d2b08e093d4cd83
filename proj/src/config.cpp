#include "ornithopter/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ornithopter/errors.hpp"

namespace ornithopter {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Reads fields out of one JSON object and remembers which keys were used,
// so leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw SchemaError(where(key) + ": missing required field");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw SchemaError(where(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError(where(key) + ": not finite");
    return d;
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : (used_.insert(key), fallback);
  }
  double angle(const std::string& key) { return number(key) * kDeg; }
  double angle(const std::string& key, double fallback_rad) {
    return has(key) ? angle(key) : fallback_rad;
  }

  long long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw SchemaError(where(key) + ": expected an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) {
    return has(key) ? integer(key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw SchemaError(where(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw SchemaError(where(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
  }

  Vec3 vec3(const std::string& key, double scale = 1.0) {
    const json& v = raw(key);
    if (!v.is_array() || v.size() != 3) throw SchemaError(where(key) + ": expected 3 numbers");
    Vec3 out;
    for (int k = 0; k < 3; ++k) {
      if (!v[static_cast<std::size_t>(k)].is_number()) {
        throw SchemaError(where(key) + ": expected 3 numbers");
      }
      out(k) = v[static_cast<std::size_t>(k)].get<double>() * scale;
    }
    return out;
  }
  Vec3 vec3(const std::string& key, const Vec3& fallback, double scale = 1.0) {
    return has(key) ? vec3(key, scale) : fallback;
  }

  // 3x3 matrix as nested rows, or 3 numbers for a diagonal.
  Mat3 mat3(const std::string& key) {
    const json& v = raw(key);
    if (v.is_array() && v.size() == 3 && v[0].is_number()) return vec3(key).asDiagonal();
    if (!v.is_array() || v.size() != 3) throw SchemaError(where(key) + ": expected a 3x3 matrix");
    Mat3 m;
    for (std::size_t r = 0; r < 3; ++r) {
      if (!v[r].is_array() || v[r].size() != 3) {
        throw SchemaError(where(key) + ": expected a 3x3 matrix");
      }
      for (std::size_t c = 0; c < 3; ++c) {
        if (!v[r][c].is_number()) throw SchemaError(where(key) + ": expected a 3x3 matrix");
        m(static_cast<int>(r), static_cast<int>(c)) = v[r][c].get<double>();
      }
    }
    return m;
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array() || v.empty()) throw SchemaError(where(key) + ": expected a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw SchemaError(where(key) + ": expected a list of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Section child(const std::string& key) { return Section(raw(key), where(key)); }

  std::string where(const std::string& key) const { return path_ + "." + key; }
  const std::string& path() const { return path_; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw SchemaError(where(it.key()) + ": unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

WingWaveform read_waveform(Section s) {
  WingWaveform w;
  w.f = s.number("f");
  w.phi_m = s.angle("phi_m");
  w.phi_0 = s.angle("phi_0");
  w.phi_a = s.angle("phi_a");
  w.phi_K = s.number("phi_K");
  w.theta_m = s.angle("theta_m");
  w.theta_0 = s.angle("theta_0");
  w.theta_a = s.angle("theta_a");
  w.theta_C = s.number("theta_C");
  w.psi_m = s.angle("psi_m");
  w.psi_0 = s.angle("psi_0");
  w.psi_a = s.angle("psi_a");
  w.psi_N = static_cast<int>(s.integer("psi_N", 1));
  w.beta = s.angle("beta");
  s.finish();
  try {
    w.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(s.path() + ": " + e.what());
  }
  return w;
}

ordered_json write_waveform(const WingWaveform& w) {
  ordered_json j;
  j["f"] = w.f;
  j["phi_m"] = w.phi_m / kDeg;
  j["phi_0"] = w.phi_0 / kDeg;
  j["phi_a"] = w.phi_a / kDeg;
  j["phi_K"] = w.phi_K;
  j["theta_m"] = w.theta_m / kDeg;
  j["theta_0"] = w.theta_0 / kDeg;
  j["theta_a"] = w.theta_a / kDeg;
  j["theta_C"] = w.theta_C;
  j["psi_m"] = w.psi_m / kDeg;
  j["psi_0"] = w.psi_0 / kDeg;
  j["psi_a"] = w.psi_a / kDeg;
  j["psi_N"] = w.psi_N;
  j["beta"] = w.beta / kDeg;
  return j;
}

bool same_waveform(const WingWaveform& a, const WingWaveform& b) {
  return a.f == b.f && a.phi_m == b.phi_m && a.phi_0 == b.phi_0 && a.phi_a == b.phi_a &&
         a.phi_K == b.phi_K && a.theta_m == b.theta_m && a.theta_0 == b.theta_0 &&
         a.theta_a == b.theta_a && a.theta_C == b.theta_C && a.psi_m == b.psi_m &&
         a.psi_0 == b.psi_0 && a.psi_a == b.psi_a && a.psi_N == b.psi_N && a.beta == b.beta;
}

std::string resolve(const std::string& base_dir, const std::string& file) {
  std::filesystem::path p(file);
  if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
  return p.string();
}

WingBody read_wing(Section s, std::size_t index, const std::string& base_dir) {
  WingBody w;
  w.mass = s.number("mass");
  w.inertia = s.mat3("inertia");
  w.joint_offset = s.vec3("mu");
  w.com_offset = s.vec3("kappa");
  w.shape.span_length = s.number("span_length");
  w.shape.chord_scale = s.number("chord_scale", 0.01);
  w.shape.side_parity = side_parity(index);
  if (s.has("contour")) {
    Section c = s.child("contour");
    const std::string le = resolve(base_dir, c.string("leading"));
    const std::string te = resolve(base_dir, c.string("trailing"));
    const int degree = static_cast<int>(c.integer("degree", 7));
    c.finish();
    for (const auto& f : {le, te}) {
      if (!std::filesystem::exists(f)) {
        throw SchemaError(s.where("contour") + ": file not found: " + f);
      }
    }
    std::vector<ContourPoint> lp, tp;
    try {
      lp = read_contour_points(le);
      tp = read_contour_points(te);
    } catch (const std::runtime_error& e) {
      throw ParseError(s.where("contour") + ": " + e.what());
    }
    const PlanformFit fit = fit_edge_polynomials(lp, tp, degree);
    w.shape.lambda_le = fit.leading.coefficients;
    w.shape.lambda_te = fit.trailing.coefficients;
    w.shape.fit_quality_le = fit.leading.r_squared;
    w.shape.fit_quality_te = fit.trailing.r_squared;
  } else {
    w.shape.lambda_le = s.numbers("lambda_le");
    w.shape.lambda_te = s.numbers("lambda_te");
    w.shape.fit_quality_le = s.number("fit_quality_le", 0.0);
    w.shape.fit_quality_te = s.number("fit_quality_te", 0.0);
  }
  s.finish();
  return w;
}

ordered_json mat_json(const Mat3& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

ordered_json vec_json(const Vec3& v, double scale = 1.0) {
  return ordered_json::array({v(0) * scale, v(1) * scale, v(2) * scale});
}

Morphology read_morphology(Section s, const std::string& base_dir) {
  Morphology m;
  m.body_mass = s.number("body_mass");
  m.body_inertia = s.mat3("body_inertia");
  m.gravity = s.number("gravity", 9.81);
  const json& wings = s.raw("wings");
  if (!wings.is_array() || wings.size() != kWingCount) {
    throw SchemaError(s.where("wings") + ": expected 4 wing objects");
  }
  for (std::size_t i = 0; i < kWingCount; ++i) {
    m.wings[i] = read_wing(Section(wings[i], s.where("wings") + "[" + std::to_string(i) + "]"),
                           i, base_dir);
  }
  s.finish();
  return m;
}

ordered_json write_morphology(const Morphology& m) {
  ordered_json j;
  j["body_mass"] = m.body_mass;
  j["body_inertia"] = mat_json(m.body_inertia);
  j["gravity"] = m.gravity;
  j["wings"] = ordered_json::array();
  for (const WingBody& w : m.wings) {
    ordered_json wj;
    wj["mass"] = w.mass;
    wj["inertia"] = mat_json(w.inertia);
    wj["mu"] = vec_json(w.joint_offset);
    wj["kappa"] = vec_json(w.com_offset);
    wj["span_length"] = w.shape.span_length;
    wj["chord_scale"] = w.shape.chord_scale;
    wj["lambda_le"] = w.shape.lambda_le;
    wj["lambda_te"] = w.shape.lambda_te;
    wj["fit_quality_le"] = w.shape.fit_quality_le;
    wj["fit_quality_te"] = w.shape.fit_quality_te;
    j["wings"].push_back(wj);
  }
  return j;
}

TrigUnits parse_trig_units(const std::string& s, const std::string& where) {
  if (s == "degrees") return TrigUnits::Degrees;
  if (s == "radians") return TrigUnits::Radians;
  throw SchemaError(where + ": expected \"degrees\" or \"radians\"");
}

AeroModel read_aero(Section s) {
  AeroModel a;
  a.rho = s.number("rho", a.rho);
  a.stations = static_cast<int>(s.integer("stations", a.stations));
  a.velocity_floor = s.number("velocity_floor", a.velocity_floor);
  if (s.has("trig_units")) a.trig_units = parse_trig_units(s.string("trig_units"), s.where("trig_units"));
  if (s.has("center")) {
    Section c = s.child("center");
    a.center.slope = c.number("slope", a.center.slope);
    a.center.offset = c.number("offset", a.center.offset);
    c.finish();
  }
  if (s.has("lift")) {
    Section c = s.child("lift");
    a.lift.c0 = c.number("c0", a.lift.c0);
    a.lift.amplitude = c.number("amplitude", a.lift.amplitude);
    a.lift.rate = c.number("rate", a.lift.rate);
    a.lift.shift = c.number("shift", a.lift.shift);
    c.finish();
  }
  if (s.has("drag")) {
    Section c = s.child("drag");
    a.drag.c0 = c.number("c0", a.drag.c0);
    a.drag.amplitude = c.number("amplitude", a.drag.amplitude);
    a.drag.rate = c.number("rate", a.drag.rate);
    a.drag.shift = c.number("shift", a.drag.shift);
    c.finish();
  }
  s.finish();
  try {
    a.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(s.path() + ": " + e.what());
  }
  return a;
}

ordered_json write_aero(const AeroModel& a) {
  ordered_json j;
  j["rho"] = a.rho;
  j["stations"] = a.stations;
  j["velocity_floor"] = a.velocity_floor;
  j["trig_units"] = a.trig_units == TrigUnits::Degrees ? "degrees" : "radians";
  j["center"] = {{"slope", a.center.slope}, {"offset", a.center.offset}};
  j["lift"] = {{"c0", a.lift.c0}, {"amplitude", a.lift.amplitude}, {"rate", a.lift.rate},
               {"shift", a.lift.shift}};
  j["drag"] = {{"c0", a.drag.c0}, {"amplitude", a.drag.amplitude}, {"rate", a.drag.rate},
               {"shift", a.drag.shift}};
  return j;
}

GAConfig read_optimization(Section s) {
  GAConfig g;
  g.population = static_cast<int>(s.integer("population", g.population));
  g.generations = static_cast<int>(s.integer("generations", g.generations));
  g.crossover_rate = s.number("crossover_rate", g.crossover_rate);
  g.mutation_rate = s.number("mutation_rate", g.mutation_rate);
  g.mutation_scale = s.number("mutation_scale", g.mutation_scale);
  g.mutation_decay = s.boolean("mutation_decay", g.mutation_decay);
  g.mutation_floor = s.number("mutation_floor", g.mutation_floor);
  g.elitism = static_cast<int>(s.integer("elitism", g.elitism));
  g.tournament = static_cast<int>(s.integer("tournament", g.tournament));
  g.workers = static_cast<int>(s.integer("workers", g.workers));
  g.w1 = s.number("w1", g.w1);
  g.w2 = s.number("w2", g.w2);
  g.horizon_periods = s.number("horizon_periods", g.horizon_periods);
  g.p_ref = s.vec3("p_ref", g.p_ref);
  g.dt = s.number("dt", g.dt);
  g.divergence_penalty = s.number("divergence_penalty", g.divergence_penalty);
  if (s.has("cost_model")) {
    try {
      g.cost_model = parse_cost_model(s.string("cost_model"));
    } catch (const std::invalid_argument& e) {
      throw SchemaError(s.where("cost_model") + ": " + e.what());
    }
  }
  s.finish();
  return g;
}

ordered_json write_optimization(const GAConfig& g) {
  ordered_json j;
  j["population"] = g.population;
  j["generations"] = g.generations;
  j["crossover_rate"] = g.crossover_rate;
  j["mutation_rate"] = g.mutation_rate;
  j["mutation_scale"] = g.mutation_scale;
  j["mutation_decay"] = g.mutation_decay;
  j["mutation_floor"] = g.mutation_floor;
  j["elitism"] = g.elitism;
  j["tournament"] = g.tournament;
  j["workers"] = g.workers;
  j["w1"] = g.w1;
  j["w2"] = g.w2;
  j["horizon_periods"] = g.horizon_periods;
  j["p_ref"] = vec_json(g.p_ref);
  j["dt"] = g.dt;
  j["cost_model"] = to_string(g.cost_model);
  j["divergence_penalty"] = g.divergence_penalty;
  return j;
}

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1e-300, std::abs(a), std::abs(b)}) || a == b;
}

bool close(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (!close(a.data()[k], b.data()[k], tol)) return false;
  }
  return true;
}

bool close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!close(a[k], b[k], tol)) return false;
  }
  return true;
}

// Angles pass through degrees in the file, so an exact zero can come back as
// ~1e-17; compare them with an absolute floor as well.
bool close_angle(double a, double b, double tol) {
  return close(a, b, tol) || std::abs(a - b) <= 1e-15;
}

bool close(const WingWaveform& a, const WingWaveform& b, double tol) {
  return close(a.f, b.f, tol) && close_angle(a.phi_m, b.phi_m, tol) &&
         close_angle(a.phi_0, b.phi_0, tol) && close_angle(a.phi_a, b.phi_a, tol) &&
         close(a.phi_K, b.phi_K, tol) && close_angle(a.theta_m, b.theta_m, tol) &&
         close_angle(a.theta_0, b.theta_0, tol) && close_angle(a.theta_a, b.theta_a, tol) &&
         close(a.theta_C, b.theta_C, tol) && close_angle(a.psi_m, b.psi_m, tol) &&
         close_angle(a.psi_0, b.psi_0, tol) && close_angle(a.psi_a, b.psi_a, tol) &&
         a.psi_N == b.psi_N && close_angle(a.beta, b.beta, tol);
}

}  // namespace

TorqueMode parse_torque_mode(const std::string& name) {
  if (name == "zero") return TorqueMode::Zero;
  if (name == "tracking") return TorqueMode::Tracking;
  throw std::invalid_argument("unknown torque mode '" + name + "' (expected zero or tracking)");
}

std::string to_string(TorqueMode mode) { return mode == TorqueMode::Zero ? "zero" : "tracking"; }

void check_config(LoadedConfig& loaded) {
  RunConfig& c = loaded.config;
  std::vector<std::string> bound_messages;
  for (std::size_t i = 0; i < kWingCount; ++i) {
    for (const auto& v : check_bounds(c.kinematics.wings[i])) {
      bound_messages.push_back("wing " + std::to_string(i + 1) + ": " + v.message);
    }
  }
  for (std::size_t i = 1; i < kWingCount; ++i) {
    if (c.kinematics.wings[i].f != c.kinematics.wings[0].f) {
      loaded.warnings.push_back("wing " + std::to_string(i + 1) +
                                ": flapping frequency differs from wing 1; the body pitch and "
                                "the hover horizon use wing 1's frequency");
    }
  }
  if (c.strict_bounds && !bound_messages.empty()) {
    std::string all;
    for (const auto& m : bound_messages) all += (all.empty() ? "" : "; ") + m;
    throw BoundsError(all);
  }
  loaded.warnings.insert(loaded.warnings.end(), bound_messages.begin(), bound_messages.end());

  MorphologyReport report;
  try {
    report = c.morphology.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("morphology: ") + e.what());
  }
  loaded.warnings.insert(loaded.warnings.end(), report.warnings.begin(), report.warnings.end());
  loaded.diagnostics.insert(loaded.diagnostics.end(), report.diagnostics.begin(),
                            report.diagnostics.end());

  const IntegratorSettings& in = c.integrator;
  if (!(in.dt > 0.0)) throw SchemaError("integrator.dt must be positive");
  if (!(in.duration >= 0.0)) throw SchemaError("integrator.duration must be non-negative");
  if (in.output_stride < 1) throw SchemaError("integrator.output_stride must be at least 1");
  if (!(c.kinematics.fd_step > 0.0)) throw SchemaError("integrator.fd_step must be positive");
  try {
    c.optimization.validate();
    c.aero.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

LoadedConfig parse_config(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed config: ") + e.what());
  }
  LoadedConfig loaded;
  RunConfig& c = loaded.config;
  Section s(root, "config");

  c.schema_version = static_cast<int>(s.integer("schema_version"));
  if (c.schema_version != kSchemaVersion) {
    throw SchemaError("config.schema_version: unsupported version " +
                      std::to_string(c.schema_version) + " (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
  try {
    c.inertia_mode = parse_inertia_mode(s.string("inertia_mode", "rescaled"));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("config.inertia_mode: ") + e.what());
  }

  if (!s.has("morphology") || (s.raw("morphology").is_string())) {
    const std::string name = s.string("morphology", "dragonfly");
    if (name != "dragonfly") {
      throw SchemaError("config.morphology: unknown dataset '" + name + "' (expected \"dragonfly\")");
    }
    c.morphology_source = "dragonfly";
    c.morphology = default_dragonfly(c.inertia_mode);
  } else {
    c.morphology_source = "inline";
    c.morphology = read_morphology(s.child("morphology"), base_dir);
  }

  if (s.has("aero")) c.aero = read_aero(s.child("aero"));

  const json& wf = s.raw("waveforms");
  if (wf.is_array()) {
    if (wf.size() != kWingCount) throw SchemaError("config.waveforms: expected 4 entries");
    for (std::size_t i = 0; i < kWingCount; ++i) {
      c.kinematics.wings[i] =
          read_waveform(Section(wf[i], "config.waveforms[" + std::to_string(i) + "]"));
    }
  } else {
    Section w = s.child("waveforms");
    const WingWaveform fore = read_waveform(w.child("fore"));
    const WingWaveform hind = read_waveform(w.child("hind"));
    w.finish();
    c.kinematics.wings = {fore, fore, hind, hind};
  }

  if (s.has("body_pitch")) {
    Section b = s.child("body_pitch");
    c.body_pitch.amplitude = b.angle("Phi_Bm");
    c.body_pitch.phase = b.angle("Phi_Ba");
    c.body_pitch.offset = b.angle("Phi_B0");
    b.finish();
  }

  if (s.has("initial_state")) {
    Section b = s.child("initial_state");
    c.initial_state.position = b.vec3("p", c.initial_state.position);
    c.initial_state.velocity = b.vec3("v", c.initial_state.velocity);
    c.initial_state.attitude = b.vec3("attitude_rotvec", c.initial_state.attitude, kDeg);
    c.initial_state.body_rate = b.vec3("Omega_B", c.initial_state.body_rate);
    b.finish();
  }

  if (s.has("integrator")) {
    Section b = s.child("integrator");
    c.integrator.dt = b.number("dt", c.integrator.dt);
    c.integrator.duration = b.number("duration", c.integrator.duration);
    c.integrator.output_stride = static_cast<int>(b.integer("output_stride", c.integrator.output_stride));
    if (b.has("torque_mode")) {
      try {
        c.integrator.torque_mode = parse_torque_mode(b.string("torque_mode"));
      } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("config.integrator.torque_mode: ") + e.what());
      }
    }
    const std::string derivs = b.string("derivatives", "analytic");
    if (derivs != "analytic" && derivs != "finite_difference") {
      throw SchemaError(
          "config.integrator.derivatives: expected \"analytic\" or \"finite_difference\"");
    }
    c.kinematics.finite_difference = derivs == "finite_difference";
    c.kinematics.fd_step = b.number("fd_step", c.kinematics.fd_step);
    b.finish();
  }

  if (s.has("optimization")) c.optimization = read_optimization(s.child("optimization"));

  if (s.has("outputs")) {
    Section b = s.child("outputs");
    c.outputs.directory = b.string("directory", c.outputs.directory);
    c.outputs.altitude_up = b.boolean("altitude_up", c.outputs.altitude_up);
    b.finish();
  }

  if (s.has("seed")) {
    const json& v = s.raw("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw SchemaError("config.seed: expected a non-negative integer");
    }
    c.seed = v.get<std::uint64_t>();
  }
  c.optimization.seed = c.seed;
  c.strict_bounds = s.boolean("strict_bounds", false);
  s.finish();

  check_config(loaded);
  return loaded;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string base = std::filesystem::path(path).parent_path().string();
  LoadedConfig loaded = parse_config(buf.str(), base.empty() ? "." : base);
  loaded.config.source_path = path;
  return loaded;
}

std::string serialize_config(const RunConfig& c) {
  ordered_json j;
  j["schema_version"] = c.schema_version;
  j["inertia_mode"] = to_string(c.inertia_mode);
  if (c.morphology_source == "dragonfly") {
    j["morphology"] = "dragonfly";
  } else {
    j["morphology"] = write_morphology(c.morphology);
  }
  j["aero"] = write_aero(c.aero);
  const auto& w = c.kinematics.wings;
  if (same_waveform(w[0], w[1]) && same_waveform(w[2], w[3])) {
    j["waveforms"] = {{"fore", write_waveform(w[0])}, {"hind", write_waveform(w[2])}};
  } else {
    j["waveforms"] = ordered_json::array();
    for (const auto& wave : w) j["waveforms"].push_back(write_waveform(wave));
  }
  j["body_pitch"] = {{"Phi_Bm", c.body_pitch.amplitude / kDeg},
                     {"Phi_Ba", c.body_pitch.phase / kDeg},
                     {"Phi_B0", c.body_pitch.offset / kDeg}};
  j["initial_state"] = {{"p", vec_json(c.initial_state.position)},
                        {"v", vec_json(c.initial_state.velocity)},
                        {"attitude_rotvec", vec_json(c.initial_state.attitude, 1.0 / kDeg)},
                        {"Omega_B", vec_json(c.initial_state.body_rate)}};
  j["integrator"] = {{"dt", c.integrator.dt},
                     {"duration", c.integrator.duration},
                     {"output_stride", c.integrator.output_stride},
                     {"torque_mode", to_string(c.integrator.torque_mode)},
                     {"derivatives", c.kinematics.finite_difference ? "finite_difference" : "analytic"},
                     {"fd_step", c.kinematics.fd_step}};
  j["optimization"] = write_optimization(c.optimization);
  j["outputs"] = {{"directory", c.outputs.directory}, {"altitude_up", c.outputs.altitude_up}};
  j["seed"] = c.seed;
  j["strict_bounds"] = c.strict_bounds;
  return j.dump(2) + "\n";
}

bool equivalent(const RunConfig& a, const RunConfig& b, double tol) {
  if (a.schema_version != b.schema_version || a.inertia_mode != b.inertia_mode ||
      a.morphology_source != b.morphology_source || a.seed != b.seed ||
      a.strict_bounds != b.strict_bounds) {
    return false;
  }
  const Morphology& ma = a.morphology;
  const Morphology& mb = b.morphology;
  if (!close(ma.body_mass, mb.body_mass, tol) || !close(ma.body_inertia, mb.body_inertia, tol) ||
      !close(ma.gravity, mb.gravity, tol)) {
    return false;
  }
  for (std::size_t i = 0; i < kWingCount; ++i) {
    const WingBody& wa = ma.wings[i];
    const WingBody& wb = mb.wings[i];
    if (!close(wa.mass, wb.mass, tol) || !close(wa.inertia, wb.inertia, tol) ||
        !close(wa.joint_offset, wb.joint_offset, tol) || !close(wa.com_offset, wb.com_offset, tol) ||
        !close(wa.shape.lambda_le, wb.shape.lambda_le, tol) ||
        !close(wa.shape.lambda_te, wb.shape.lambda_te, tol) ||
        !close(wa.shape.span_length, wb.shape.span_length, tol) ||
        !close(wa.shape.chord_scale, wb.shape.chord_scale, tol) ||
        wa.shape.side_parity != wb.shape.side_parity) {
      return false;
    }
    if (!close(a.kinematics.wings[i], b.kinematics.wings[i], tol)) return false;
  }
  const AeroModel& aa = a.aero;
  const AeroModel& ab = b.aero;
  if (!close(aa.rho, ab.rho, tol) || aa.stations != ab.stations || aa.trig_units != ab.trig_units ||
      !close(aa.velocity_floor, ab.velocity_floor, tol) ||
      !close(aa.center.slope, ab.center.slope, tol) ||
      !close(aa.center.offset, ab.center.offset, tol) || !close(aa.lift.c0, ab.lift.c0, tol) ||
      !close(aa.lift.amplitude, ab.lift.amplitude, tol) || !close(aa.lift.rate, ab.lift.rate, tol) ||
      !close(aa.lift.shift, ab.lift.shift, tol) || !close(aa.drag.c0, ab.drag.c0, tol) ||
      !close(aa.drag.amplitude, ab.drag.amplitude, tol) || !close(aa.drag.rate, ab.drag.rate, tol) ||
      !close(aa.drag.shift, ab.drag.shift, tol)) {
    return false;
  }
  if (a.kinematics.finite_difference != b.kinematics.finite_difference ||
      !close(a.kinematics.fd_step, b.kinematics.fd_step, tol)) {
    return false;
  }
  if (!close_angle(a.body_pitch.amplitude, b.body_pitch.amplitude, tol) ||
      !close_angle(a.body_pitch.phase, b.body_pitch.phase, tol) ||
      !close_angle(a.body_pitch.offset, b.body_pitch.offset, tol)) {
    return false;
  }
  const InitialState& ia = a.initial_state;
  const InitialState& ib = b.initial_state;
  if (!close(ia.position, ib.position, tol) || !close(ia.velocity, ib.velocity, tol) ||
      !close(ia.attitude, ib.attitude, tol) || !close(ia.body_rate, ib.body_rate, tol)) {
    return false;
  }
  const IntegratorSettings& na = a.integrator;
  const IntegratorSettings& nb = b.integrator;
  if (!close(na.dt, nb.dt, tol) || !close(na.duration, nb.duration, tol) ||
      na.output_stride != nb.output_stride || na.torque_mode != nb.torque_mode) {
    return false;
  }
  const GAConfig& ga = a.optimization;
  const GAConfig& gb = b.optimization;
  if (ga.population != gb.population || ga.generations != gb.generations ||
      !close(ga.crossover_rate, gb.crossover_rate, tol) ||
      !close(ga.mutation_rate, gb.mutation_rate, tol) ||
      !close(ga.mutation_scale, gb.mutation_scale, tol) || ga.mutation_decay != gb.mutation_decay ||
      !close(ga.mutation_floor, gb.mutation_floor, tol) || ga.elitism != gb.elitism ||
      ga.tournament != gb.tournament || ga.workers != gb.workers || !close(ga.w1, gb.w1, tol) ||
      !close(ga.w2, gb.w2, tol) || !close(ga.horizon_periods, gb.horizon_periods, tol) ||
      !close(ga.p_ref, gb.p_ref, tol) || !close(ga.dt, gb.dt, tol) ||
      ga.cost_model != gb.cost_model || !close(ga.divergence_penalty, gb.divergence_penalty, tol) ||
      ga.seed != gb.seed) {
    return false;
  }
  return a.outputs.directory == b.outputs.directory && a.outputs.altitude_up == b.outputs.altitude_up;
}

}  // namespace ornithopter

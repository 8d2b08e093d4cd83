#include "ornithopter/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ornithopter/config.hpp"
#include "ornithopter/errors.hpp"
#include "ornithopter/full_dynamics.hpp"
#include "ornithopter/io.hpp"
#include "ornithopter/optimization.hpp"
#include "ornithopter/reduced_dynamics.hpp"
#include "ornithopter/validation.hpp"

namespace ornithopter {

namespace {

namespace fs = std::filesystem;

constexpr double kDeg = 180.0 / std::numbers::pi;

std::shared_ptr<spdlog::logger> logger() {
  static const std::shared_ptr<spdlog::logger> log = [] {
    auto l = spdlog::stderr_color_mt("ornithopter");
    l->set_pattern("[%l] %v");
    spdlog::level::level_enum level = spdlog::level::info;
    if (const char* env = std::getenv("ORNITHOPTER_LOG")) {
      level = spdlog::level::from_str(env);
    }
    l->set_level(level);
    return l;
  }();
  return log;
}

struct CommonOptions {
  std::string config_path;
  std::string output_dir;
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> inertia_mode;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("config", o.config_path, "run configuration file")->required();
  sub->add_option("-o,--output-dir", o.output_dir, "output directory (overrides outputs.directory)");
  sub->add_option("--dt", o.dt, "integration step [s]")->check(CLI::PositiveNumber);
  sub->add_option("--duration", o.duration, "simulated time [s]")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--inertia-mode", o.inertia_mode, "rescaled or paper_literal")
      ->check(CLI::IsMember({"rescaled", "paper_literal"}));
}

// Loads the config and applies the command-line overrides.
LoadedConfig load_with_overrides(const CommonOptions& o) {
  LoadedConfig loaded = load_config(o.config_path);
  RunConfig& c = loaded.config;
  bool changed = false;
  if (o.dt) {
    c.integrator.dt = *o.dt;
    changed = true;
  }
  if (o.duration) c.integrator.duration = *o.duration;
  if (o.seed) {
    c.seed = *o.seed;
    c.optimization.seed = *o.seed;
  }
  if (o.inertia_mode) {
    c.inertia_mode = parse_inertia_mode(*o.inertia_mode);
    if (c.morphology_source == "dragonfly") {
      c.morphology = default_dragonfly(c.inertia_mode);
      changed = true;
    } else {
      logger()->warn("--inertia-mode has no effect on an inline morphology");
    }
  }
  if (!o.output_dir.empty()) c.outputs.directory = o.output_dir;
  if (changed) {
    LoadedConfig rechecked;
    rechecked.config = c;
    check_config(rechecked);
    loaded = rechecked;
  }
  for (const auto& w : loaded.warnings) logger()->warn("{}", w);
  for (const auto& d : loaded.diagnostics) logger()->debug("{}", d);
  return loaded;
}

class OutputSet {
 public:
  OutputSet(const RunConfig& config, std::string command)
      : dir_(config.outputs.directory) {
    manifest_.command = std::move(command);
    manifest_.config_path = config.source_path;
    std::ifstream in(config.source_path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    manifest_.config_sha256 = sha256_hex(buf.str());
    manifest_.seed = config.seed;
    manifest_.extra["inertia_mode"] = to_string(config.inertia_mode);
    manifest_.extra["dt"] = format_number(config.integrator.dt);
    manifest_.extra["duration"] = format_number(config.integrator.duration);
  }

  void write(const std::string& name, const std::string& content) {
    write_file_atomic(dir_ / name, content);
    manifest_.outputs.push_back(name);
    logger()->info("wrote {}", (dir_ / name).string());
  }
  void note(const std::string& key, const std::string& value) { manifest_.extra[key] = value; }
  void finish() { write_file_atomic(dir_ / "manifest.json", manifest_json(manifest_)); }

 private:
  fs::path dir_;
  RunManifest manifest_;
};

long step_count(double duration, double dt) {
  return std::max(1L, static_cast<long>(std::llround(duration / dt)));
}

void append_vec(std::vector<double>& row, const Vec3& v) { row.insert(row.end(), {v(0), v(1), v(2)}); }

void append_rotation(std::vector<double>& row, const Rotation& r) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) row.push_back(r.matrix()(i, j));
  }
}

std::vector<std::string> vec_header(const std::string& name, const std::string& unit) {
  return {name + "1 [" + unit + "]", name + "2 [" + unit + "]", name + "3 [" + unit + "]"};
}

std::vector<std::string> body_header(bool altitude) {
  std::vector<std::string> h = {"t [s]"};
  for (auto&& s : vec_header("p", "m")) h.push_back(s);
  for (auto&& s : vec_header("v", "m/s")) h.push_back(s);
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) h.push_back("A_B" + std::to_string(i) + std::to_string(j) + " [-]");
  }
  for (auto&& s : vec_header("Omega_B", "rad/s")) h.push_back(s);
  if (altitude) h.push_back("altitude [m]");
  return h;
}

std::vector<double> body_row(const BodyState& b, bool altitude) {
  std::vector<double> row = {b.t};
  append_vec(row, b.position);
  append_vec(row, b.velocity);
  append_rotation(row, b.attitude);
  append_vec(row, b.body_rate);
  if (altitude) row.push_back(-b.position(2));
  return row;
}

int simulate_full(const CommonOptions& o) {
  const LoadedConfig loaded = load_with_overrides(o);
  const RunConfig& c = loaded.config;
  const Vehicle vehicle(c.morphology, c.aero);
  const bool altitude = c.outputs.altitude_up;

  BodyState body0;
  body0.position = c.initial_state.position;
  body0.velocity = c.initial_state.velocity;
  body0.attitude = exp_so3(c.initial_state.attitude);
  body0.body_rate = c.initial_state.body_rate;
  SystemState s = compose_state(body0, sample_wings(c.kinematics, 0.0));

  TorqueLaw law;
  if (c.integrator.torque_mode == TorqueMode::Tracking) {
    law = tracking_torque_law(vehicle, c.kinematics);
  }

  std::vector<std::string> header = body_header(false);
  for (std::size_t i = 1; i <= kWingCount; ++i) {
    const std::string n = std::to_string(i);
    header.insert(header.end(), {"phi_" + n + " [deg]", "theta_" + n + " [deg]", "psi_" + n + " [deg]"});
    for (auto&& h : vec_header("Omega_" + n + "_", "rad/s")) header.push_back(h);
  }
  if (altitude) header.push_back("altitude [m]");
  CsvTable trajectory(header);
  std::vector<std::string> dh = {"t [s]", "T [J]", "U [J]", "E [J]"};
  for (auto&& h : vec_header("P", "kg m/s")) dh.push_back(h);
  CsvTable diag(dh);

  const auto record = [&](const SystemState& x) {
    std::vector<double> row = body_row(body_part(x), false);
    for (std::size_t i = 0; i < kWingCount; ++i) {
      const AnglesOnly a = extract_angles(x.wing_attitudes[i].matrix(), c.kinematics.wings[i].beta, i);
      row.insert(row.end(), {a.phi * kDeg, a.theta * kDeg, a.psi * kDeg});
      append_vec(row, x.wing_rates[i]);
    }
    if (altitude) row.push_back(-x.position(2));
    trajectory.add_row(row);
    const Diagnostics d = diagnostics(x, c.morphology);
    std::vector<double> drow = {x.t, d.kinetic, d.potential, d.total};
    append_vec(drow, d.linear_momentum);
    diag.add_row(drow);
  };

  const long steps = step_count(c.integrator.duration, c.integrator.dt);
  logger()->info("simulate-full: {} steps of {} s, torque mode {}", steps, c.integrator.dt,
                 to_string(c.integrator.torque_mode));
  record(s);
  for (long n = 1; n <= steps; ++n) {
    s = step(vehicle, s, law, c.integrator.dt);
    if (n % c.integrator.output_stride == 0 || n == steps) record(s);
  }
  OutputSet out(c, "simulate-full");
  out.note("torque_mode", to_string(c.integrator.torque_mode));
  out.write("trajectory.csv", trajectory.str());
  out.write("diagnostics.csv", diag.str());
  out.finish();
  return kExitOk;
}

BodyState initial_body(const RunConfig& c) {
  BodyState b;
  b.position = c.initial_state.position;
  b.velocity = c.initial_state.velocity;
  b.attitude = exp_so3(c.initial_state.attitude);
  b.body_rate = c.initial_state.body_rate;
  return b;
}

int simulate_reduced(const CommonOptions& o, bool prescribed) {
  const LoadedConfig loaded = load_with_overrides(o);
  const RunConfig& c = loaded.config;
  const Vehicle vehicle(c.morphology, c.aero);
  const bool altitude = c.outputs.altitude_up;
  CsvTable trajectory(body_header(altitude));
  const long steps = step_count(c.integrator.duration, c.integrator.dt);
  const int stride = c.integrator.output_stride;

  if (prescribed) {
    long n = 0;
    const double f = c.kinematics.frequency();
    double diverged_at = 0.0;
    const bool ok = integrate_prescribed(
        vehicle, c.kinematics, c.body_pitch, c.initial_state.position, c.initial_state.velocity,
        static_cast<double>(steps) * c.integrator.dt, c.integrator.dt,
        [&](double t, const Vec3& p, const Vec3& v) {
          if (n++ % stride != 0 && n != steps + 1) return;
          const PitchSample ps = body_pitch(c.body_pitch, f, t);
          BodyState b;
          b.t = t;
          b.position = p;
          b.velocity = v;
          b.attitude = ps.attitude;
          b.body_rate = ps.rate;
          trajectory.add_row(body_row(b, altitude));
        },
        &diverged_at);
    if (!ok) throw NonFiniteState("prescribed-pitch run diverged", diverged_at);
  } else {
    BodyState b = initial_body(c);
    trajectory.add_row(body_row(b, altitude));
    for (long n = 1; n <= steps; ++n) {
      b = step_reduced(vehicle, b, c.kinematics, c.integrator.dt);
      if (n % stride == 0 || n == steps) trajectory.add_row(body_row(b, altitude));
    }
  }
  OutputSet out(c, "simulate-reduced");
  out.note("body_motion", prescribed ? "prescribed_pitch" : "free");
  out.write("trajectory.csv", trajectory.str());
  out.finish();
  return kExitOk;
}

int decompose(const CommonOptions& o, bool prescribed) {
  const LoadedConfig loaded = load_with_overrides(o);
  const RunConfig& c = loaded.config;
  const Vehicle vehicle(c.morphology, c.aero);
  std::vector<std::string> header = {"t [s]",       "|F_c| [N]",     "|F_B| [N]",    "|F_w| [N]",
                                     "|Gamma_c| [N m]", "|Gamma_B| [N m]", "|Gamma_w| [N m]"};
  for (const char* n : {"F_c", "F_B", "F_w"}) {
    for (auto&& h : vec_header(n, "N")) header.push_back(h);
  }
  for (const char* n : {"Gamma_c", "Gamma_B", "Gamma_w"}) {
    for (auto&& h : vec_header(n, "N m")) header.push_back(h);
  }
  CsvTable table(header);
  const auto add = [&](double t, const ForceDecomposition& d) {
    std::vector<double> row = {t,           d.f_c.norm(),     d.f_b.norm(),    d.f_w.norm(),
                               d.gamma_c.norm(), d.gamma_b.norm(), d.gamma_w.norm()};
    for (const Vec3* v : {&d.f_c, &d.f_b, &d.f_w, &d.gamma_c, &d.gamma_b, &d.gamma_w}) {
      append_vec(row, *v);
    }
    table.add_row(row);
  };
  const long steps = step_count(c.integrator.duration, c.integrator.dt);
  const int stride = c.integrator.output_stride;
  if (prescribed) {
    const PrescribedRun run =
        prescribed_body_sim(vehicle, c.kinematics, c.body_pitch, c.initial_state.position,
                            c.initial_state.velocity, static_cast<double>(steps) * c.integrator.dt,
                            c.integrator.dt, stride);
    if (run.diverged) throw NonFiniteState("prescribed-pitch run diverged", run.diverged_at);
    for (const auto& s : run.samples) add(s.t, s.forces);
  } else {
    BodyState b = initial_body(c);
    for (long n = 0; n <= steps; ++n) {
      if (n % stride == 0 || n == steps) add(b.t, decompose_forces(vehicle, b, c.kinematics));
      if (n < steps) b = step_reduced(vehicle, b, c.kinematics, c.integrator.dt);
    }
  }
  OutputSet out(c, "decompose-forces");
  out.note("body_motion", prescribed ? "prescribed_pitch" : "free");
  out.write("decomposition.csv", table.str());
  out.finish();
  return kExitOk;
}

int wing_forces(const CommonOptions& o, const std::string& mode, int samples) {
  const LoadedConfig loaded = load_with_overrides(o);
  const RunConfig& c = loaded.config;
  OutputSet out(c, "wing-forces");
  out.note("mode", mode);
  if (mode == "alpha") {
    CsvTable table({"alpha [deg]", "CL [-]", "CD [-]", "gamma_ac [-]"});
    for (int k = 0; k < samples; ++k) {
      const double alpha = std::numbers::pi * k / (samples - 1);
      const AeroCoefficients co = aero_coefficients(c.aero, alpha);
      table.add_row({alpha * kDeg, co.lift, co.drag, aero_center_fraction(c.aero, alpha)});
    }
    out.write("aero_coefficients.csv", table.str());
    out.finish();
    return kExitOk;
  }
  const Vehicle vehicle(c.morphology, c.aero);
  std::vector<std::string> header = {"t [s]", "i [-]", "r [m]", "alpha [deg]", "CL [-]", "CD [-]"};
  for (auto&& h : vec_header("dL", "N")) header.push_back(h);
  for (auto&& h : vec_header("dD", "N")) header.push_back(h);
  for (auto&& h : vec_header("dM", "N m")) header.push_back(h);
  CsvTable stations(header);
  std::vector<std::string> wh = {"t [s]", "i [-]"};
  for (auto&& h : vec_header("L", "N")) wh.push_back(h);
  for (auto&& h : vec_header("D", "N")) wh.push_back(h);
  for (auto&& h : vec_header("M", "N m")) wh.push_back(h);
  CsvTable wings(wh);
  const double period = 1.0 / c.kinematics.frequency();
  BodyState body = initial_body(c);
  for (int k = 0; k < samples; ++k) {
    body.t = period * k / samples;
    const SystemState s = compose_state(body, sample_wings(c.kinematics, body.t));
    for (std::size_t i = 0; i < kWingCount; ++i) {
      const StationTable& table = vehicle.stations(i);
      for (std::size_t q = 0; q < table.r.size(); ++q) {
        const StationLoads l = station_loads(c.aero, s, c.morphology, i, table.r[q], table.dr);
        std::vector<double> row = {body.t, static_cast<double>(i + 1), table.r[q], l.alpha * kDeg,
                                   l.coefficients.lift, l.coefficients.drag};
        append_vec(row, l.lift);
        append_vec(row, l.drag);
        append_vec(row, l.moment);
        stations.add_row(row);
      }
      const WingWrench w = wing_loads(c.aero, s, c.morphology, i);
      std::vector<double> row = {body.t, static_cast<double>(i + 1)};
      append_vec(row, w.lift);
      append_vec(row, w.drag);
      append_vec(row, w.moment);
      wings.add_row(row);
    }
  }
  out.write("station_loads.csv", stations.str());
  out.write("wing_loads.csv", wings.str());
  out.finish();
  return kExitOk;
}

int optimize_hover(const CommonOptions& o, std::optional<int> generations,
                   std::optional<int> population) {
  LoadedConfig loaded = load_with_overrides(o);
  RunConfig& c = loaded.config;
  if (generations) c.optimization.generations = *generations;
  if (population) c.optimization.population = *population;
  if (o.dt) c.optimization.dt = *o.dt;
  c.optimization.validate();
  const Vehicle vehicle(c.morphology, c.aero);
  const Bounds bounds = hover_bounds();
  logger()->info("optimize-hover: population {}, {} generations, cost model {}",
                 c.optimization.population, c.optimization.generations,
                 to_string(c.optimization.cost_model));
  const GAConfig cfg = c.optimization;
  const GAResult result = ga_optimize(cfg, bounds, [&](const ParameterVector& x) {
    return hover_cost(x, vehicle, cfg);
  });

  CsvTable history({"generation [-]", "best [-]", "mean [-]", "worst [-]"});
  for (const auto& g : result.history) {
    history.add_row({static_cast<double>(g.generation), g.best, g.mean, g.worst});
  }
  RunConfig best = c;
  std::tie(best.kinematics, best.body_pitch) = unpack_parameters(result.best);
  OutputSet out(c, "optimize-hover");
  out.note("best_cost", format_number(result.best_cost));
  out.write("ga_history.csv", history.str());
  out.write("best_config.cfg", serialize_config(best));
  out.finish();
  std::cout << "best hover cost " << format_number(result.best_cost) << "\n";
  return kExitOk;
}

int validate(const CommonOptions& o, bool quick) {
  const LoadedConfig loaded = load_with_overrides(o);
  const RunConfig& c = loaded.config;
  ValidationOptions opt = quick ? ValidationOptions::quick() : ValidationOptions{};
  opt.seed = c.seed;
  const ValidationReport report = run_all(c, opt);
  std::cout << report.text() << std::flush;
  OutputSet out(c, "validate");
  out.note("sizes", quick ? "quick" : "full");
  out.write("validation_report.csv", report.csv());
  out.finish();
  return report.passed() ? kExitOk : kExitNumerical;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Flapping-wing multibody simulator", "ornithopter"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonOptions common;
  bool prescribed = false, quick = false;
  std::string wing_mode = "kinematics";
  int samples = 100;
  std::optional<int> generations, population;

  auto* full = app.add_subcommand("simulate-full", "integrate the full 18-DOF model");
  add_common(full, common);
  auto* reduced = app.add_subcommand("simulate-reduced", "integrate the body with prescribed wing motion");
  add_common(reduced, common);
  reduced->add_flag("--prescribed-pitch", prescribed, "impose the body pitch from body_pitch");
  auto* decomp = app.add_subcommand("decompose-forces", "write the body force and torque decomposition");
  add_common(decomp, common);
  decomp->add_flag("--prescribed-pitch", prescribed, "impose the body pitch from body_pitch");
  auto* wings = app.add_subcommand("wing-forces", "per-station and integrated aerodynamic loads");
  add_common(wings, common);
  wings->add_option("--mode", wing_mode, "kinematics (one period) or alpha (coefficient sweep)")
      ->check(CLI::IsMember({"kinematics", "alpha"}));
  wings->add_option("--samples", samples, "time samples or alpha samples")->check(CLI::Range(2, 100000));
  auto* opt = app.add_subcommand("optimize-hover", "genetic search for hover kinematics");
  add_common(opt, common);
  opt->add_option("--generations", generations, "override optimization.generations")
      ->check(CLI::PositiveNumber);
  opt->add_option("--population", population, "override optimization.population")
      ->check(CLI::Range(2, 100000));
  auto* val = app.add_subcommand("validate", "run the invariant and acceptance checks");
  add_common(val, common);
  val->add_flag("--quick", quick, "shrink every check for a smoke run");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (full->parsed()) return simulate_full(common);
    if (reduced->parsed()) return simulate_reduced(common, prescribed);
    if (decomp->parsed()) return decompose(common, prescribed);
    if (wings->parsed()) return wing_forces(common, wing_mode, samples);
    if (opt->parsed()) return optimize_hover(common, generations, population);
    if (val->parsed()) return validate(common, quick);
  } catch (const ConfigError& e) {
    logger()->error("configuration error: {}", e.what());
    return kExitConfig;
  } catch (const NonFiniteState& e) {
    logger()->error("NonFiniteState: {} (t = {} s)", e.what(), e.time());
    return kExitNumerical;
  } catch (const NumericalError& e) {
    logger()->error("numerical failure: {}", e.what());
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    logger()->error("invalid input: {}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    logger()->error("{}", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}

int run_cli(int argc, char** argv) { return run_cli(std::vector<std::string>(argv, argv + argc)); }

}  // namespace ornithopter

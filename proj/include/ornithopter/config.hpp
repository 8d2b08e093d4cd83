#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ornithopter/aerodynamics.hpp"
#include "ornithopter/morphology.hpp"
#include "ornithopter/optimization.hpp"
#include "ornithopter/reduced_dynamics.hpp"

namespace ornithopter {

inline constexpr int kSchemaVersion = 1;

// How the wings are driven in simulate-full.
//   zero:     tau = 0, wings swing freely
//   tracking: inverse-dynamics torques with wing feedback, so the wings follow the waveforms
enum class TorqueMode { Zero, Tracking };

TorqueMode parse_torque_mode(const std::string& name);
std::string to_string(TorqueMode mode);

struct IntegratorSettings {
  double dt = 1e-5;         // s
  double duration = 0.05;   // s
  int output_stride = 10;   // steps between CSV rows
  TorqueMode torque_mode = TorqueMode::Tracking;
};

struct InitialState {
  Vec3 position = Vec3(0.0, 0.0, 2.0);   // m
  Vec3 velocity = Vec3::Zero();          // m/s, inertial
  Vec3 attitude = Vec3::Zero();          // rotation vector, rad (degrees in the file)
  Vec3 body_rate = Vec3::Zero();         // rad/s, body frame
};

struct OutputSettings {
  std::string directory = "out";
  // Adds an altitude column equal to -e3^T p for plotting. The dynamics
  // always use +e3 as the gravity direction.
  bool altitude_up = true;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  InertiaMode inertia_mode = InertiaMode::Rescaled;
  // "dragonfly" for the built-in dataset, "inline" when the file carries one.
  std::string morphology_source = "dragonfly";
  Morphology morphology;
  AeroModel aero;
  KinematicsParams kinematics;
  BodyPitch body_pitch;
  InitialState initial_state;
  IntegratorSettings integrator;
  GAConfig optimization;
  OutputSettings outputs;
  std::uint64_t seed = 1;
  bool strict_bounds = false;
  std::string source_path;  // not serialized
};

struct LoadedConfig {
  RunConfig config;
  std::vector<std::string> warnings;     // bounds and inertia-bound findings
  std::vector<std::string> diagnostics;  // informational
};

// JSON with // and /* */ comments. Angles in degrees, everything else SI.
// Throws ParseError for malformed text, SchemaError for missing, unknown or
// ill-typed fields and BoundsError (strict_bounds only) for kinematic
// parameters outside the dragonfly ranges.
LoadedConfig parse_config(const std::string& text, const std::string& base_dir = ".");
LoadedConfig load_config(const std::string& path);

std::string serialize_config(const RunConfig& config);

// Field-by-field comparison with a relative tolerance on doubles.
bool equivalent(const RunConfig& a, const RunConfig& b, double rel_tol = 1e-12);

// Re-runs bounds and morphology checks; shared by load_config and the CLI overrides.
void check_config(LoadedConfig& loaded);

}  // namespace ornithopter

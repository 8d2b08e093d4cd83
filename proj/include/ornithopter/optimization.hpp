#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ornithopter/aerodynamics.hpp"
#include "ornithopter/reduced_dynamics.hpp"

namespace ornithopter {

// Flattened hover parameters with left/right wings paired:
//   0           f (Hz)
//   1  .. 12    fore wings  phi_m phi_0 phi_a phi_K theta_m theta_0 theta_a theta_C
//                           psi_m psi_0 psi_a beta
//   13 .. 24    hind wings, same order
//   25 .. 27    Phi_Bm Phi_Ba Phi_B0
// Angles are in radians.
inline constexpr std::size_t kParameterCount = 28;
inline constexpr std::size_t kForeOffset = 1;
inline constexpr std::size_t kHindOffset = 13;
inline constexpr std::size_t kPitchOffset = 25;

using ParameterVector = std::vector<double>;

struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t size() const { return lower.size(); }
  // Throws std::invalid_argument for mismatched sizes, non-finite entries or lower > upper.
  void validate() const;
};

const std::vector<std::string>& parameter_names();

// Dragonfly kinematic ranges for both wing pairs, with the fore-wing flapping
// phase pinned to 0 as the phase reference, and body-pitch ranges
// Phi_Bm in [0, 10] deg, Phi_Ba in [-180, 180] deg, Phi_B0 in [-30, 30] deg.
Bounds hover_bounds();

ParameterVector pack_parameters(const KinematicsParams& params, const BodyPitch& pitch);
// psi_N is set to 1 for every wing.
std::pair<KinematicsParams, BodyPitch> unpack_parameters(const ParameterVector& x);

ParameterVector clamp_to_bounds(const ParameterVector& x, const Bounds& bounds);

enum class CostModel { Prescribed, Reduced };

struct GAConfig {
  int population = 50;
  int generations = 300;
  double crossover_rate = 0.8;
  double mutation_rate = 0.15;
  double mutation_scale = 0.05;  // fraction of each parameter range
  // Mutation scale shrinks linearly to mutation_scale * mutation_floor over the run.
  bool mutation_decay = true;
  double mutation_floor = 0.1;
  int elitism = 2;
  int tournament = 3;
  std::uint64_t seed = 1;
  int workers = 0;  // 0: hardware concurrency

  // Hover cost
  double w1 = 1.0;   // m^-2
  double w2 = 0.1;   // s^2 m^-2
  double horizon_periods = 10.0;
  Vec3 p_ref = Vec3(0.0, 0.0, 2.0);
  double dt = 1e-5;  // s
  CostModel cost_model = CostModel::Prescribed;
  double divergence_penalty = 1e12;

  // Throws std::invalid_argument for population < 1, rates outside [0, 1],
  // elitism outside [0, population], tournament < 1 or dt <= 0.
  void validate() const;
};

CostModel parse_cost_model(const std::string& name);
std::string to_string(CostModel model);

// Trapezoidal w1 int |p - p_ref|^2 dt + w2 int |p_dot|^2 dt over samples (t, p, v).
class CostAccumulator {
 public:
  CostAccumulator(const Vec3& p_ref, double w1, double w2) : p_ref_(p_ref), w1_(w1), w2_(w2) {}
  void add(double t, const Vec3& p, const Vec3& v);
  double position_term() const { return position_; }
  double velocity_term() const { return velocity_; }
  double total() const { return w1_ * position_ + w2_ * velocity_; }

 private:
  Vec3 p_ref_;
  double w1_, w2_;
  bool started_ = false;
  double t_prev_ = 0.0, e_prev_ = 0.0, s_prev_ = 0.0;
  double position_ = 0.0, velocity_ = 0.0;
};

struct HoverCost {
  double cost = 0.0;
  double position_term = 0.0;  // int |p - p_ref|^2 dt
  double velocity_term = 0.0;  // int |p_dot|^2 dt
  double max_excursion = 0.0;  // max |p - p_ref|
  bool diverged = false;
};

// Starts at p_ref at rest, flies T_f = horizon_periods / f.
HoverCost evaluate_hover(const KinematicsParams& params, const BodyPitch& pitch,
                         const Vehicle& vehicle, const GAConfig& cfg);
double hover_cost(const ParameterVector& x, const Vehicle& vehicle, const GAConfig& cfg);

struct GenerationRecord {
  int generation = 0;
  double best = 0.0;
  double mean = 0.0;
  double worst = 0.0;
};

struct GAResult {
  ParameterVector best;
  double best_cost = 0.0;
  std::vector<GenerationRecord> history;  // entry 0 is the initial population
};

using CostFunction = std::function<double(const ParameterVector&)>;

// Tournament selection, uniform crossover, Gaussian mutation and elitism.
// The random stream is consumed only by the serial loop; evaluations of a
// generation run on a worker pool and must be thread-safe.
GAResult ga_optimize(const GAConfig& cfg, const Bounds& bounds, const CostFunction& cost);

}  // namespace ornithopter

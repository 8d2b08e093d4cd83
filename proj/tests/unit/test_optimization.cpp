#include <cmath>
#include <mutex>

#include <gtest/gtest.h>

#include "ornithopter/optimization.hpp"
#include "test_support.hpp"

namespace ornithopter::test {

namespace {

Vehicle vacuum(double gravity) {
  Morphology m = vacuum_morphology();
  m.gravity = gravity;
  return Vehicle(m, no_air());
}

GAConfig short_horizon() {
  GAConfig cfg;
  cfg.horizon_periods = 2.0;
  cfg.dt = 1e-4;
  return cfg;
}

double sphere(const ParameterVector& x) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - 0.5 * k) * (x[k] - 0.5 * k);
  return s;
}

Bounds box(std::size_t n, double lo, double hi) {
  return Bounds{std::vector<double>(n, lo), std::vector<double>(n, hi)};
}

}  // namespace

TEST(HoverCost, StationaryVehicleCostsNothing) {
  const HoverCost c = evaluate_hover(frozen_kinematics(), BodyPitch{}, vacuum(0.0), short_horizon());
  EXPECT_FALSE(c.diverged);
  EXPECT_EQ(c.cost, 0.0);
  EXPECT_EQ(c.max_excursion, 0.0);
}

TEST(HoverCost, BallisticClosedForm) {
  // p - p_ref = g t^2 / 2 e3, v = g t e3.
  GAConfig cfg = short_horizon();
  cfg.w1 = 1.0;
  cfg.w2 = 0.1;
  const double g = 9.81, horizon = cfg.horizon_periods / frozen_kinematics().frequency();
  cfg.dt = horizon / 500.0;
  const HoverCost c = evaluate_hover(frozen_kinematics(), BodyPitch{}, vacuum(g), cfg);
  const double position = g * g * std::pow(horizon, 5) / 20.0;
  const double velocity = g * g * std::pow(horizon, 3) / 3.0;
  EXPECT_NEAR(c.position_term, position, 1e-5 * position);
  EXPECT_NEAR(c.velocity_term, velocity, 1e-5 * velocity);
  EXPECT_NEAR(c.cost, cfg.w1 * position + cfg.w2 * velocity, 1e-5 * c.cost);
  EXPECT_NEAR(c.max_excursion, 0.5 * g * horizon * horizon, 1e-12);
}

TEST(HoverCost, LinearInTheWeights) {
  GAConfig cfg = short_horizon();
  const Vehicle v = vacuum(9.81);
  const HoverCost a = evaluate_hover(frozen_kinematics(), BodyPitch{}, v, cfg);
  cfg.w1 *= 2.0;
  const HoverCost b = evaluate_hover(frozen_kinematics(), BodyPitch{}, v, cfg);
  EXPECT_NEAR(b.cost - a.cost, a.position_term * short_horizon().w1, 1e-12 * b.cost);
}

TEST(HoverCost, AccumulatorIsTrapezoidal) {
  CostAccumulator acc(Vec3::Zero(), 1.0, 1.0);
  for (int k = 0; k <= 4; ++k) {
    const double t = 0.25 * k;
    acc.add(t, Vec3(t, 0, 0), Vec3(1, 0, 0));
  }
  EXPECT_NEAR(acc.position_term(), 1.0 / 3.0 + 1.0 / 96.0, 1e-15);
  EXPECT_NEAR(acc.velocity_term(), 1.0, 1e-15);
}

TEST(HoverCost, ConvergesUnderTimeStepRefinement) {
  const Vehicle v(vacuum_morphology(), AeroModel{});
  GAConfig coarse;
  coarse.horizon_periods = 1.0;
  coarse.dt = 1e-5;
  GAConfig fine = coarse;
  fine.dt = 5e-6;
  const double a = evaluate_hover(dragonfly_hover_kinematics(), dragonfly_hover_pitch(), v, coarse).cost;
  const double b = evaluate_hover(dragonfly_hover_kinematics(), dragonfly_hover_pitch(), v, fine).cost;
  EXPECT_NEAR(a, b, 5e-3 * b);
}

TEST(Parameters, PackUnpackRoundTrip) {
  const KinematicsParams k = dragonfly_hover_kinematics();
  const BodyPitch p = dragonfly_hover_pitch();
  const ParameterVector x = pack_parameters(k, p);
  ASSERT_EQ(x.size(), kParameterCount);
  EXPECT_EQ(parameter_names().size(), kParameterCount);
  const auto [k2, p2] = unpack_parameters(x);
  for (std::size_t i = 0; i < kWingCount; ++i) {
    EXPECT_EQ(k2.wings[i].phi_m, k.wings[i].phi_m);
    EXPECT_EQ(k2.wings[i].theta_C, k.wings[i].theta_C);
    EXPECT_EQ(k2.wings[i].beta, k.wings[i].beta);
  }
  EXPECT_EQ(p2.amplitude, p.amplitude);
  EXPECT_EQ(p2.offset, p.offset);
}

TEST(Parameters, HoverSolutionIsInsideTheBounds) {
  const Bounds b = hover_bounds();
  b.validate();
  const ParameterVector x = pack_parameters(dragonfly_hover_kinematics(), dragonfly_hover_pitch());
  for (std::size_t k = 0; k < x.size(); ++k) {
    EXPECT_GE(x[k], b.lower[k]) << parameter_names()[k];
    EXPECT_LE(x[k], b.upper[k]) << parameter_names()[k];
  }
}

TEST(Parameters, ClampMovesOutOfRangeValuesToTheEdge) {
  const Bounds b = hover_bounds();
  ParameterVector x = pack_parameters(dragonfly_hover_kinematics(), dragonfly_hover_pitch());
  x[0] = 10.0;
  x[kForeOffset + 3] = 1.5;  // phi_K
  const ParameterVector c = clamp_to_bounds(x, b);
  EXPECT_EQ(c[0], 30.0);
  EXPECT_EQ(c[kForeOffset + 3], 1.0);
  EXPECT_EQ(c[kForeOffset], x[kForeOffset]);
}

TEST(Parameters, BoundsRejectInvertedInterval) {
  Bounds b = box(3, 0.0, 1.0);
  b.lower[1] = 2.0;
  EXPECT_THROW(b.validate(), std::invalid_argument);
}

TEST(GA, FindsTheMinimumOfAConvexFunction) {
  GAConfig cfg;
  cfg.population = 40;
  cfg.generations = 200;
  cfg.seed = 7;
  const GAResult r = ga_optimize(cfg, box(4, -5.0, 5.0), sphere);
  EXPECT_LT(r.best_cost, 1e-2);
  EXPECT_EQ(r.history.size(), 201u);
  for (std::size_t g = 1; g < r.history.size(); ++g) {
    EXPECT_LE(r.history[g].best, r.history[g - 1].best);  // elitism
  }
}

TEST(GA, SameSeedGivesIdenticalRuns) {
  GAConfig cfg;
  cfg.population = 20;
  cfg.generations = 30;
  cfg.seed = 11;
  const GAResult a = ga_optimize(cfg, box(4, -5.0, 5.0), sphere);
  cfg.workers = 1;
  const GAResult b = ga_optimize(cfg, box(4, -5.0, 5.0), sphere);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.best_cost, b.best_cost);
  cfg.seed = 12;
  const GAResult c = ga_optimize(cfg, box(4, -5.0, 5.0), sphere);
  EXPECT_NE(a.best, c.best);
}

TEST(GA, DegenerateBoundsReturnThePinnedPoint) {
  GAConfig cfg;
  cfg.population = 8;
  cfg.generations = 5;
  Bounds b = box(3, 0.0, 1.0);
  b.lower[1] = b.upper[1] = 0.25;
  const GAResult r = ga_optimize(cfg, b, sphere);
  EXPECT_EQ(r.best[1], 0.25);
}

TEST(GA, CandidatesNeverLeaveTheBounds) {
  GAConfig cfg;
  cfg.population = 16;
  cfg.generations = 40;
  cfg.mutation_scale = 2.0;
  cfg.mutation_rate = 1.0;
  const Bounds b = box(5, -1.0, 2.0);
  std::mutex m;
  bool inside = true;
  ga_optimize(cfg, b, [&](const ParameterVector& x) {
    std::lock_guard<std::mutex> lock(m);
    for (std::size_t k = 0; k < x.size(); ++k) inside &= x[k] >= b.lower[k] && x[k] <= b.upper[k];
    return sphere(x);
  });
  EXPECT_TRUE(inside);
}

TEST(GA, SingleEliteWithoutMutationNeverChanges) {
  GAConfig cfg;
  cfg.population = 1;
  cfg.elitism = 1;
  cfg.mutation_rate = 0.0;
  cfg.generations = 10;
  const GAResult r = ga_optimize(cfg, box(3, -1.0, 1.0), sphere);
  for (std::size_t g = 1; g < r.history.size(); ++g) EXPECT_EQ(r.history[g].best, r.history[1].best);
  EXPECT_EQ(r.history[1].best, r.history[0].best);
}

TEST(GA, InvalidConfigurationThrows) {
  GAConfig cfg;
  cfg.population = 0;
  EXPECT_THROW(ga_optimize(cfg, box(2, 0, 1), sphere), std::invalid_argument);
}

}  // namespace ornithopter::test

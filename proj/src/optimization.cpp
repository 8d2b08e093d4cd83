#include "ornithopter/optimization.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "ornithopter/errors.hpp"

namespace ornithopter {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Per-wing order inside the packed vector; "f" is shared and lives at index 0.
constexpr std::array<const char*, 12> kWingFields = {
    "phi_m", "phi_0", "phi_a", "phi_K", "theta_m", "theta_0",
    "theta_a", "theta_C", "psi_m", "psi_0", "psi_a", "beta"};

double* wing_field(WingWaveform& w, std::size_t k) {
  switch (k) {
    case 0: return &w.phi_m;
    case 1: return &w.phi_0;
    case 2: return &w.phi_a;
    case 3: return &w.phi_K;
    case 4: return &w.theta_m;
    case 5: return &w.theta_0;
    case 6: return &w.theta_a;
    case 7: return &w.theta_C;
    case 8: return &w.psi_m;
    case 9: return &w.psi_0;
    case 10: return &w.psi_a;
    default: return &w.beta;
  }
}

const ParameterRange& range_named(const std::string& name) {
  for (const auto& r : dragonfly_parameter_ranges()) {
    if (name == r.name) return r;
  }
  throw std::logic_error("no kinematic range named " + name);
}

}  // namespace

void Bounds::validate() const {
  if (lower.size() != upper.size()) throw std::invalid_argument("bounds: size mismatch");
  for (std::size_t k = 0; k < lower.size(); ++k) {
    if (!std::isfinite(lower[k]) || !std::isfinite(upper[k])) {
      throw std::invalid_argument("bounds: entry " + std::to_string(k) + " is not finite");
    }
    if (lower[k] > upper[k]) {
      throw std::invalid_argument("bounds: lower > upper at entry " + std::to_string(k));
    }
  }
}

const std::vector<std::string>& parameter_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"f"};
    for (const char* prefix : {"fore.", "hind."}) {
      for (const char* field : kWingFields) n.push_back(std::string(prefix) + field);
    }
    n.insert(n.end(), {"Phi_Bm", "Phi_Ba", "Phi_B0"});
    return n;
  }();
  return names;
}

Bounds hover_bounds() {
  Bounds b;
  b.lower.resize(kParameterCount);
  b.upper.resize(kParameterCount);
  const auto& f = range_named("f");
  b.lower[0] = f.lower;
  b.upper[0] = f.upper;
  for (std::size_t offset : {kForeOffset, kHindOffset}) {
    for (std::size_t k = 0; k < kWingFields.size(); ++k) {
      const auto& r = range_named(kWingFields[k]);
      const double scale = r.angle ? kDeg : 1.0;
      b.lower[offset + k] = r.lower * scale;
      b.upper[offset + k] = r.upper * scale;
    }
  }
  b.lower[kForeOffset + 2] = 0.0;
  b.upper[kForeOffset + 2] = 0.0;
  b.lower[kPitchOffset] = 0.0;
  b.upper[kPitchOffset] = 10.0 * kDeg;
  b.lower[kPitchOffset + 1] = -180.0 * kDeg;
  b.upper[kPitchOffset + 1] = 180.0 * kDeg;
  b.lower[kPitchOffset + 2] = -30.0 * kDeg;
  b.upper[kPitchOffset + 2] = 30.0 * kDeg;
  return b;
}

ParameterVector pack_parameters(const KinematicsParams& params, const BodyPitch& pitch) {
  ParameterVector x(kParameterCount);
  x[0] = params.frequency();
  for (auto [offset, wing] : {std::pair{kForeOffset, 0}, std::pair{kHindOffset, 2}}) {
    WingWaveform w = params.wings[static_cast<std::size_t>(wing)];
    for (std::size_t k = 0; k < kWingFields.size(); ++k) x[offset + k] = *wing_field(w, k);
  }
  x[kPitchOffset] = pitch.amplitude;
  x[kPitchOffset + 1] = pitch.phase;
  x[kPitchOffset + 2] = pitch.offset;
  return x;
}

std::pair<KinematicsParams, BodyPitch> unpack_parameters(const ParameterVector& x) {
  if (x.size() != kParameterCount) {
    throw std::invalid_argument("parameter vector must have " + std::to_string(kParameterCount) +
                                " entries");
  }
  KinematicsParams params;
  for (std::size_t i = 0; i < kWingCount; ++i) {
    WingWaveform& w = params.wings[i];
    const std::size_t offset = i < 2 ? kForeOffset : kHindOffset;
    w.f = x[0];
    w.psi_N = 1;
    for (std::size_t k = 0; k < kWingFields.size(); ++k) *wing_field(w, k) = x[offset + k];
  }
  BodyPitch pitch{x[kPitchOffset], x[kPitchOffset + 1], x[kPitchOffset + 2]};
  return {params, pitch};
}

ParameterVector clamp_to_bounds(const ParameterVector& x, const Bounds& bounds) {
  if (x.size() != bounds.size()) throw std::invalid_argument("clamp_to_bounds: size mismatch");
  ParameterVector out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = std::clamp(x[k], bounds.lower[k], bounds.upper[k]);
  }
  return out;
}

void GAConfig::validate() const {
  const auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in [0, 1]");
  };
  if (population < 1) throw std::invalid_argument("population must be at least 1");
  if (generations < 0) throw std::invalid_argument("generations must be non-negative");
  unit(crossover_rate, "crossover_rate");
  unit(mutation_rate, "mutation_rate");
  unit(mutation_floor, "mutation_floor");
  if (!(mutation_scale >= 0.0)) throw std::invalid_argument("mutation_scale must be non-negative");
  if (elitism < 0 || elitism > population) {
    throw std::invalid_argument("elitism must be in [0, population]");
  }
  if (tournament < 1) throw std::invalid_argument("tournament size must be at least 1");
  if (!(dt > 0.0)) throw std::invalid_argument("cost dt must be positive");
  if (!(horizon_periods > 0.0)) throw std::invalid_argument("horizon_periods must be positive");
  if (!(w1 >= 0.0) || !(w2 >= 0.0)) throw std::invalid_argument("cost weights must be non-negative");
  if (workers < 0) throw std::invalid_argument("workers must be non-negative");
}

CostModel parse_cost_model(const std::string& name) {
  if (name == "prescribed") return CostModel::Prescribed;
  if (name == "reduced") return CostModel::Reduced;
  throw std::invalid_argument("unknown cost model '" + name + "' (expected prescribed or reduced)");
}

std::string to_string(CostModel model) {
  return model == CostModel::Prescribed ? "prescribed" : "reduced";
}

void CostAccumulator::add(double t, const Vec3& p, const Vec3& v) {
  const double e = (p - p_ref_).squaredNorm();
  const double s = v.squaredNorm();
  if (started_) {
    const double h = t - t_prev_;
    position_ += 0.5 * h * (e + e_prev_);
    velocity_ += 0.5 * h * (s + s_prev_);
  }
  started_ = true;
  t_prev_ = t;
  e_prev_ = e;
  s_prev_ = s;
}

HoverCost evaluate_hover(const KinematicsParams& params, const BodyPitch& pitch,
                         const Vehicle& vehicle, const GAConfig& cfg) {
  const double horizon = cfg.horizon_periods / params.frequency();
  CostAccumulator acc(cfg.p_ref, cfg.w1, cfg.w2);
  HoverCost out;
  const auto visit = [&](double t, const Vec3& p, const Vec3& v) {
    acc.add(t, p, v);
    out.max_excursion = std::max(out.max_excursion, (p - cfg.p_ref).norm());
  };

  double diverged_at = horizon;
  bool ok = true;
  try {
    if (cfg.cost_model == CostModel::Prescribed) {
      ok = integrate_prescribed(vehicle, params, pitch, cfg.p_ref, Vec3::Zero(), horizon, cfg.dt,
                                visit, &diverged_at);
    } else {
      const PitchSample p0 = body_pitch(pitch, params.frequency(), 0.0);
      BodyState body;
      body.position = cfg.p_ref;
      body.attitude = p0.attitude;
      body.body_rate = p0.rate;
      visit(0.0, body.position, body.velocity);
      const auto steps = static_cast<long>(std::llround(horizon / cfg.dt));
      for (long n = 0; n < steps; ++n) {
        body = step_reduced(vehicle, body, params, cfg.dt);
        if (body.position.norm() > 1e6) {
          ok = false;
          diverged_at = body.t;
          break;
        }
        visit(body.t, body.position, body.velocity);
      }
    }
  } catch (const NonFiniteState& e) {
    ok = false;
    diverged_at = e.time();
  } catch (const NumericalError&) {
    ok = false;
  }

  out.position_term = acc.position_term();
  out.velocity_term = acc.velocity_term();
  if (ok) {
    out.cost = acc.total();
  } else {
    // Earlier divergence costs more, which still ranks failed candidates.
    out.diverged = true;
    out.cost = cfg.divergence_penalty * (2.0 - std::clamp(diverged_at / horizon, 0.0, 1.0));
  }
  return out;
}

double hover_cost(const ParameterVector& x, const Vehicle& vehicle, const GAConfig& cfg) {
  const auto [params, pitch] = unpack_parameters(x);
  return evaluate_hover(params, pitch, vehicle, cfg).cost;
}

namespace {

void evaluate_all(const std::vector<ParameterVector>& pop, std::vector<double>& costs,
                  const CostFunction& cost, int workers) {
  costs.assign(pop.size(), 0.0);
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), pop.size());
  if (n_threads <= 1) {
    for (std::size_t k = 0; k < pop.size(); ++k) costs[k] = cost(pop[k]);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) {
    threads.emplace_back([&] {
      for (std::size_t k = next++; k < pop.size(); k = next++) {
        try {
          costs[k] = cost(pop[k]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (failure) std::rethrow_exception(failure);
}

GenerationRecord summarize(int generation, const std::vector<double>& costs) {
  GenerationRecord r;
  r.generation = generation;
  r.best = *std::min_element(costs.begin(), costs.end());
  r.worst = *std::max_element(costs.begin(), costs.end());
  r.mean = std::accumulate(costs.begin(), costs.end(), 0.0) / static_cast<double>(costs.size());
  return r;
}

}  // namespace

GAResult ga_optimize(const GAConfig& cfg, const Bounds& bounds, const CostFunction& cost) {
  cfg.validate();
  bounds.validate();
  const std::size_t dim = bounds.size();
  const auto pop_size = static_cast<std::size_t>(cfg.population);
  int workers = cfg.workers;
  if (workers == 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<ParameterVector> pop(pop_size, ParameterVector(dim));
  for (auto& x : pop) {
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] = bounds.lower[k] + unit(rng) * (bounds.upper[k] - bounds.lower[k]);
    }
  }
  std::vector<double> costs;
  evaluate_all(pop, costs, cost, workers);

  GAResult result;
  result.history.push_back(summarize(0, costs));

  std::vector<std::size_t> order(pop_size);
  for (int gen = 1; gen <= cfg.generations; ++gen) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });

    const auto tournament = [&]() -> const ParameterVector& {
      std::size_t best = static_cast<std::size_t>(unit(rng) * static_cast<double>(pop_size));
      best = std::min(best, pop_size - 1);
      for (int k = 1; k < cfg.tournament; ++k) {
        std::size_t c = std::min(static_cast<std::size_t>(unit(rng) * static_cast<double>(pop_size)),
                                 pop_size - 1);
        if (costs[c] < costs[best]) best = c;
      }
      return pop[best];
    };

    double scale = cfg.mutation_scale;
    if (cfg.mutation_decay && cfg.generations > 1) {
      const double progress = static_cast<double>(gen - 1) / static_cast<double>(cfg.generations - 1);
      scale *= 1.0 - (1.0 - cfg.mutation_floor) * progress;
    }

    std::vector<ParameterVector> next;
    next.reserve(pop_size);
    std::vector<double> elite_costs;
    for (std::size_t e = 0; e < static_cast<std::size_t>(cfg.elitism); ++e) {
      next.push_back(pop[order[e]]);
      elite_costs.push_back(costs[order[e]]);
    }
    while (next.size() < pop_size) {
      const ParameterVector& a = tournament();
      const ParameterVector& b = tournament();
      ParameterVector child = a;
      if (unit(rng) < cfg.crossover_rate) {
        for (std::size_t k = 0; k < dim; ++k) {
          if (unit(rng) < 0.5) child[k] = b[k];
        }
      }
      for (std::size_t k = 0; k < dim; ++k) {
        if (unit(rng) < cfg.mutation_rate) {
          child[k] += scale * (bounds.upper[k] - bounds.lower[k]) * normal(rng);
        }
      }
      next.push_back(clamp_to_bounds(child, bounds));
    }

    // Elites keep their cost; only the new candidates are evaluated.
    std::vector<ParameterVector> fresh(next.begin() + cfg.elitism, next.end());
    std::vector<double> fresh_costs;
    evaluate_all(fresh, fresh_costs, cost, workers);
    costs = elite_costs;
    costs.insert(costs.end(), fresh_costs.begin(), fresh_costs.end());
    pop = std::move(next);
    result.history.push_back(summarize(gen, costs));
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(costs.begin(), costs.end()) - costs.begin());
  result.best = pop[best];
  result.best_cost = costs[best];
  return result;
}

}  // namespace ornithopter

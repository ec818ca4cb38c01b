#include <cmath>

#include "gwosae/errors.hpp"
#include "gwosae/optimizers.hpp"
#include "optimizer_detail.hpp"

namespace gwosae {

namespace {

// Keeps alpha <= beta <= delta as the three best positions seen so far.
// Strict comparisons: on ties the earlier candidate keeps its rank.
void offer_leader(GwoState& s, const Wolf& w) {
  if (w.fitness < s.alpha.fitness) {
    s.delta = std::move(s.beta);
    s.beta = std::move(s.alpha);
    s.alpha = w;
  } else if (w.fitness < s.beta.fitness) {
    s.delta = std::move(s.beta);
    s.beta = w;
  } else if (w.fitness < s.delta.fitness) {
    s.delta = w;
  }
}

double a_schedule(const OptimizerConfig& cfg, std::size_t iteration) {
  const double a_start = cfg.param("gwo.a_start", 2.0);
  const double a_end = cfg.param("gwo.a_end", 0.0);
  const double frac = static_cast<double>(iteration) / static_cast<double>(cfg.max_iterations);
  return a_start - (a_start - a_end) * frac;
}

}  // namespace

GwoState gwo_init(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f) {
  space.validate();
  cfg.validate();
  if (cfg.algorithm != Algorithm::gwo) throw ConfigError("gwo_init called with a non-GWO config");

  GwoState s;
  s.rng = Rng(cfg.seed);
  auto positions = detail::random_population(space, cfg.population_size, s.rng);
  const auto fitness = detail::evaluate_all(cfg, f, positions);
  s.evaluations = positions.size();

  s.alpha.fitness = s.beta.fitness = s.delta.fitness = detail::kInf;
  s.population.resize(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    s.population[i] = Wolf{std::move(positions[i]), fitness[i]};
    offer_leader(s, s.population[i]);
  }
  // With every fitness infinite the leaders are still well-defined positions.
  for (Wolf* leader : {&s.alpha, &s.beta, &s.delta}) {
    if (leader->position.empty()) *leader = s.population.front();
  }
  s.a_coef = a_schedule(cfg, 0);
  return s;
}

std::vector<double> gwo_move(std::span<const double> x, std::span<const double> alpha,
                             std::span<const double> beta, std::span<const double> delta,
                             double a, Rng& rng) {
  std::vector<double> next(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    double sum = 0.0;
    for (const auto& leader : {alpha, beta, delta}) {
      const double big_a = 2.0 * a * rng.uniform() - a;
      const double big_c = 2.0 * rng.uniform();
      const double dist = std::fabs(big_c * leader[j] - x[j]);
      sum += leader[j] - big_a * dist;
    }
    next[j] = sum / 3.0;
  }
  return next;
}

void gwo_step(GwoState& s, const SearchSpace& space, const OptimizerConfig& cfg,
              const Objective& f) {
  std::vector<std::vector<double>> candidates(s.population.size());
  for (std::size_t i = 0; i < s.population.size(); ++i) {
    candidates[i] = gwo_move(s.population[i].position, s.alpha.position, s.beta.position,
                             s.delta.position, s.a_coef, s.rng);
    space.clamp(candidates[i]);
  }
  const auto fitness = detail::evaluate_all(cfg, f, candidates);
  s.evaluations += candidates.size();
  for (std::size_t i = 0; i < s.population.size(); ++i) {
    s.population[i].position = std::move(candidates[i]);
    s.population[i].fitness = fitness[i];
    offer_leader(s, s.population[i]);
  }
  ++s.iteration;
  s.a_coef = a_schedule(cfg, s.iteration);
}

RunTrace run_gwo(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f) {
  const detail::Stopwatch clock;
  GwoState s = gwo_init(space, cfg, f);
  RunTrace trace;
  trace.best_fitness_per_iteration.reserve(cfg.max_iterations);
  for (std::size_t t = 0; t < cfg.max_iterations; ++t) {
    gwo_step(s, space, cfg, f);
    trace.best_fitness_per_iteration.push_back(s.alpha.fitness);
  }
  trace.best_position = s.alpha.position;
  trace.evaluations = s.evaluations;
  trace.wall_time_seconds = clock.seconds();
  return trace;
}

}  // namespace gwosae

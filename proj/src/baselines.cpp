// Canonical textbook baselines: global-best PSO, real-coded GA, and ABC.
// Each one records evaluations exactly:
//   PSO: population * (1 + iterations)
//   GA:  population + iterations * (population - elitism)
//   ABC: n + iterations * 2n + scouts, n = population / 2 food sources,
//        at most one scout per iteration

#include <algorithm>
#include <cmath>

#include "gwosae/errors.hpp"
#include "gwosae/optimizers.hpp"
#include "optimizer_detail.hpp"

namespace gwosae {

namespace {

double box_width(const SearchSpace& space) { return space.hi - space.lo; }

}  // namespace

// --- PSO --------------------------------------------------------------------

PsoState pso_init(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f) {
  space.validate();
  cfg.validate();
  PsoState s;
  s.rng = Rng(cfg.seed);
  s.positions = detail::random_population(space, cfg.population_size, s.rng);
  // Particles start at rest.
  s.velocities.assign(cfg.population_size, std::vector<double>(space.dim, 0.0));
  s.personal_best = s.positions;
  s.personal_best_fitness = detail::evaluate_all(cfg, f, s.positions);
  s.evaluations = s.positions.size();
  s.global_best = Wolf{s.positions.front(), detail::kInf};
  for (std::size_t i = 0; i < s.positions.size(); ++i) {
    detail::offer_best(s.global_best, s.positions[i], s.personal_best_fitness[i]);
  }
  return s;
}

void pso_step(PsoState& s, const SearchSpace& space, const OptimizerConfig& cfg,
              const Objective& f) {
  const double w = cfg.param("pso.inertia", 0.729);
  const double c1 = cfg.param("pso.cognitive", 1.49445);
  const double c2 = cfg.param("pso.social", 1.49445);
  const double vmax = cfg.param("pso.vmax_fraction", 0.5) * box_width(space);
  const auto& g = s.global_best.position;

  for (std::size_t i = 0; i < s.positions.size(); ++i) {
    auto& x = s.positions[i];
    auto& v = s.velocities[i];
    const auto& p = s.personal_best[i];
    for (std::size_t j = 0; j < space.dim; ++j) {
      const double r1 = s.rng.uniform();
      const double r2 = s.rng.uniform();
      v[j] = w * v[j] + c1 * r1 * (p[j] - x[j]) + c2 * r2 * (g[j] - x[j]);
      v[j] = std::clamp(v[j], -vmax, vmax);
      x[j] += v[j];
    }
    space.clamp(x);
  }
  const auto fitness = detail::evaluate_all(cfg, f, s.positions);
  s.evaluations += s.positions.size();
  for (std::size_t i = 0; i < s.positions.size(); ++i) {
    if (fitness[i] < s.personal_best_fitness[i]) {
      s.personal_best[i] = s.positions[i];
      s.personal_best_fitness[i] = fitness[i];
    }
    detail::offer_best(s.global_best, s.positions[i], fitness[i]);
  }
}

// --- GA ---------------------------------------------------------------------

GaState ga_init_from(std::vector<std::vector<double>> population, const SearchSpace& space,
                     const OptimizerConfig& cfg, const Objective& f) {
  space.validate();
  cfg.validate();
  if (population.size() != cfg.population_size) {
    throw ConfigError("initial GA population size does not match the config");
  }
  GaState s;
  s.rng = Rng(cfg.seed);
  for (auto& x : population) {
    if (x.size() != space.dim) throw ShapeError("initial GA member has the wrong dimension");
    space.clamp(x);
  }
  s.population = std::move(population);
  s.fitness = detail::evaluate_all(cfg, f, s.population);
  s.evaluations = s.population.size();
  s.best = Wolf{s.population.front(), detail::kInf};
  for (std::size_t i = 0; i < s.population.size(); ++i) {
    detail::offer_best(s.best, s.population[i], s.fitness[i]);
  }
  return s;
}

GaState ga_init(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f) {
  space.validate();
  Rng rng(cfg.seed);
  auto population = detail::random_population(space, cfg.population_size, rng);
  GaState s = ga_init_from(std::move(population), space, cfg, f);
  s.rng = rng;
  return s;
}

void ga_step(GaState& s, const SearchSpace& space, const OptimizerConfig& cfg,
             const Objective& f) {
  const double pc = cfg.param("ga.crossover_rate", 0.9);
  const double pm = cfg.param("ga.mutation_rate", 1.0 / static_cast<double>(space.dim));
  const double sigma = cfg.param("ga.mutation_sigma", 0.05) * box_width(space);
  const auto tournament = static_cast<std::size_t>(cfg.param("ga.tournament_size", 3.0));
  const auto elites = static_cast<std::size_t>(cfg.param("ga.elitism", 1.0));
  const std::size_t n = s.population.size();

  auto select = [&]() -> const std::vector<double>& {
    std::size_t winner = s.rng.below(n);
    for (std::size_t t = 1; t < tournament; ++t) {
      const std::size_t c = s.rng.below(n);
      if (s.fitness[c] < s.fitness[winner]) winner = c;
    }
    return s.population[winner];
  };

  // Elites: indices of the fittest members, ties by lower index.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s.fitness[a] < s.fitness[b]; });

  std::vector<std::vector<double>> children;
  children.reserve(n - elites);
  for (std::size_t c = elites; c < n; ++c) {
    const auto& p1 = select();
    const auto& p2 = select();
    std::vector<double> child = p1;
    if (s.rng.uniform() < pc) {
      for (std::size_t j = 0; j < space.dim; ++j) {
        if (s.rng.uniform() < 0.5) child[j] = p2[j];
      }
    }
    for (std::size_t j = 0; j < space.dim; ++j) {
      if (s.rng.uniform() < pm) child[j] += sigma * s.rng.normal();
    }
    space.clamp(child);
    children.push_back(std::move(child));
  }
  const auto child_fitness = detail::evaluate_all(cfg, f, children);
  s.evaluations += children.size();

  std::vector<std::vector<double>> next;
  std::vector<double> next_fitness;
  next.reserve(n);
  next_fitness.reserve(n);
  for (std::size_t e = 0; e < elites; ++e) {
    next.push_back(s.population[order[e]]);
    next_fitness.push_back(s.fitness[order[e]]);
  }
  for (std::size_t c = 0; c < children.size(); ++c) {
    detail::offer_best(s.best, children[c], child_fitness[c]);
    next.push_back(std::move(children[c]));
    next_fitness.push_back(child_fitness[c]);
  }
  s.population = std::move(next);
  s.fitness = std::move(next_fitness);
}

// --- ABC --------------------------------------------------------------------

namespace {

std::size_t food_sources(const OptimizerConfig& cfg) { return cfg.population_size / 2; }

double abc_limit(const SearchSpace& space, const OptimizerConfig& cfg) {
  return cfg.param("abc.limit", 0.6 * static_cast<double>(cfg.population_size) *
                                    static_cast<double>(space.dim));
}

// v = x_i with one coordinate j moved by phi * (x_ij - x_kj), k != i.
std::vector<double> neighbour(const AbcState& s, std::size_t i, const SearchSpace& space,
                              Rng& rng) {
  const std::size_t n = s.sources.size();
  std::size_t k = rng.below(n - 1);
  if (k >= i) ++k;
  const std::size_t j = rng.below(space.dim);
  const double phi = rng.uniform(-1.0, 1.0);
  std::vector<double> v = s.sources[i];
  v[j] += phi * (s.sources[i][j] - s.sources[k][j]);
  space.clamp(v);
  return v;
}

double quality(double fitness) {
  return fitness >= 0.0 ? 1.0 / (1.0 + fitness) : 1.0 + std::fabs(fitness);
}

void greedy_apply(AbcState& s, std::span<const std::size_t> targets,
                  std::vector<std::vector<double>>& candidates, std::span<const double> fitness) {
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const std::size_t i = targets[c];
    if (fitness[c] < s.fitness[i]) {
      s.sources[i] = std::move(candidates[c]);
      s.fitness[i] = fitness[c];
      s.trials[i] = 0;
      detail::offer_best(s.best, s.sources[i], s.fitness[i]);
    } else {
      ++s.trials[i];
    }
  }
}

}  // namespace

AbcState abc_init(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f) {
  space.validate();
  cfg.validate();
  AbcState s;
  s.rng = Rng(cfg.seed);
  s.sources = detail::random_population(space, food_sources(cfg), s.rng);
  s.fitness = detail::evaluate_all(cfg, f, s.sources);
  s.trials.assign(s.sources.size(), 0);
  s.evaluations = s.sources.size();
  s.best = Wolf{s.sources.front(), detail::kInf};
  for (std::size_t i = 0; i < s.sources.size(); ++i) {
    detail::offer_best(s.best, s.sources[i], s.fitness[i]);
  }
  return s;
}

void abc_step(AbcState& s, const SearchSpace& space, const OptimizerConfig& cfg,
              const Objective& f) {
  const std::size_t n = s.sources.size();
  std::vector<std::size_t> targets(n);
  std::vector<std::vector<double>> candidates(n);

  // Employed bees: one neighbour per source.
  for (std::size_t i = 0; i < n; ++i) {
    targets[i] = i;
    candidates[i] = neighbour(s, i, space, s.rng);
  }
  auto fitness = detail::evaluate_all(cfg, f, candidates);
  s.evaluations += n;
  greedy_apply(s, targets, candidates, fitness);

  // Onlookers: sources chosen with probability proportional to quality.
  std::vector<double> cumulative(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += quality(s.fitness[i]);
    cumulative[i] = total;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t i;
    if (total > 0.0) {
      const double u = s.rng.uniform() * total;
      i = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                   cumulative.begin());
      i = std::min(i, n - 1);
    } else {
      i = s.rng.below(n);
    }
    targets[c] = i;
    candidates[c] = neighbour(s, i, space, s.rng);
  }
  fitness = detail::evaluate_all(cfg, f, candidates);
  s.evaluations += n;
  greedy_apply(s, targets, candidates, fitness);

  // Scout: abandon the most exhausted source once it passes the limit.
  const auto worn = static_cast<std::size_t>(
      std::max_element(s.trials.begin(), s.trials.end()) - s.trials.begin());
  if (static_cast<double>(s.trials[worn]) > abc_limit(space, cfg)) {
    std::vector<std::vector<double>> scout{uniform_in(s.rng, space.lo, space.hi, space.dim)};
    const auto scout_fitness = detail::evaluate_all(cfg, f, scout);
    s.evaluations += 1;
    s.sources[worn] = std::move(scout.front());
    s.fitness[worn] = scout_fitness.front();
    s.trials[worn] = 0;
    detail::offer_best(s.best, s.sources[worn], s.fitness[worn]);
  }
}

// --- Shared driver ----------------------------------------------------------

namespace {

template <typename State, typename Init, typename Step, typename Best>
RunTrace drive(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f,
               Init init, Step step, Best best) {
  const detail::Stopwatch clock;
  State s = init(space, cfg, f);
  RunTrace trace;
  trace.best_fitness_per_iteration.reserve(cfg.max_iterations);
  for (std::size_t t = 0; t < cfg.max_iterations; ++t) {
    step(s, space, cfg, f);
    trace.best_fitness_per_iteration.push_back(best(s).fitness);
  }
  trace.best_position = best(s).position;
  trace.evaluations = s.evaluations;
  trace.wall_time_seconds = clock.seconds();
  return trace;
}

}  // namespace

RunTrace run_baseline(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f) {
  switch (cfg.algorithm) {
    case Algorithm::pso:
      return drive<PsoState>(space, cfg, f, pso_init, pso_step,
                             [](const PsoState& s) -> const Wolf& { return s.global_best; });
    case Algorithm::ga:
      return drive<GaState>(space, cfg, f, ga_init, ga_step,
                            [](const GaState& s) -> const Wolf& { return s.best; });
    case Algorithm::abc:
      return drive<AbcState>(space, cfg, f, abc_init, abc_step,
                             [](const AbcState& s) -> const Wolf& { return s.best; });
    case Algorithm::gwo:
      break;
  }
  throw ConfigError("run_baseline handles pso, ga and abc only; got '" +
                    std::string(to_string(cfg.algorithm)) + "'");
}

}  // namespace gwosae

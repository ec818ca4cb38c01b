#pragma once

// Population-based black-box minimizers sharing one contract:
//   * every evaluated position lies inside the search box,
//   * best-so-far bookkeeping is greedy, so traces never increase,
//   * all random draws for an iteration happen serially in population order
//     before the batch is evaluated (possibly in parallel), so results do not
//     depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gwosae/kernels.hpp"
#include "gwosae/rng.hpp"

namespace gwosae {

enum class Algorithm { gwo, pso, ga, abc };

std::string_view to_string(Algorithm algorithm) noexcept;
/// Accepts "gwo", "pso", "ga", "abc" (case-insensitive). Throws ConfigError otherwise.
Algorithm parse_algorithm(std::string_view token);
inline constexpr std::string_view kAlgorithmTokens = "gwo, pso, ga, abc";

/// Axis-aligned box [lo, hi]^dim.
struct SearchSpace {
  std::size_t dim = 1;
  double lo = -20.0;
  double hi = 20.0;

  void validate() const;
  bool contains(std::span<const double> x) const noexcept;
  void clamp(std::span<double> x) const noexcept;
};

/// Per-algorithm tunables, looked up by key with documented defaults:
///   gwo.a_start (2), gwo.a_end (0)
///   pso.inertia (0.729), pso.cognitive (1.49445), pso.social (1.49445),
///   pso.vmax_fraction (0.5 of box width)
///   ga.crossover_rate (0.9), ga.mutation_rate (1/dim), ga.mutation_sigma (0.05 of box width),
///   ga.tournament_size (3), ga.elitism (1)
///   abc.limit (0.6 * population * dim)
struct OptimizerConfig {
  std::size_t population_size = 30;
  std::size_t max_iterations = 500;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::gwo;
  std::map<std::string, double> params;
  Execution execution = Execution::parallel;

  void validate() const;
  double param(const std::string& key, double fallback) const;

  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

/// Keys accepted in OptimizerConfig::params.
std::span<const std::string_view> known_param_keys() noexcept;

struct Wolf {
  std::vector<double> position;
  double fitness = 0.0;
};

struct GwoState {
  std::vector<Wolf> population;
  Wolf alpha;
  Wolf beta;
  Wolf delta;
  double a_coef = 2.0;
  std::size_t iteration = 0;
  std::size_t evaluations = 0;
  Rng rng;
};

/// Result of one optimizer run.
struct RunTrace {
  std::vector<double> best_fitness_per_iteration;
  std::vector<double> best_position;
  double wall_time_seconds = 0.0;
  std::size_t evaluations = 0;

  double final_best() const { return best_fitness_per_iteration.back(); }
};

// --- Grey wolf optimizer ----------------------------------------------------

/// Uniform population in the box, evaluated, with the three fittest as leaders.
GwoState gwo_init(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f);

/// Candidate position for one wolf (before clamping): the mean of the three
/// leader-guided moves X_l - A_l * |C_l * X_l - X| with A_l = 2a*r1 - a and
/// C_l = 2*r2, fresh r1, r2 per coordinate and per leader.
std::vector<double> gwo_move(std::span<const double> x, std::span<const double> alpha,
                             std::span<const double> beta, std::span<const double> delta,
                             double a, Rng& rng);

/// Moves every wolf, clamps, re-evaluates, refreshes leaders, and lowers a.
void gwo_step(GwoState& state, const SearchSpace& space, const OptimizerConfig& cfg,
              const Objective& f);

RunTrace run_gwo(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f);

// --- Baselines --------------------------------------------------------------

struct PsoState {
  std::vector<std::vector<double>> positions;
  std::vector<std::vector<double>> velocities;
  std::vector<std::vector<double>> personal_best;
  std::vector<double> personal_best_fitness;
  Wolf global_best;
  std::size_t evaluations = 0;
  Rng rng;
};

PsoState pso_init(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f);
void pso_step(PsoState& state, const SearchSpace& space, const OptimizerConfig& cfg,
              const Objective& f);

struct GaState {
  std::vector<std::vector<double>> population;
  std::vector<double> fitness;
  Wolf best;
  std::size_t evaluations = 0;
  Rng rng;
};

GaState ga_init(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f);
/// Starts from a caller-provided population (each member clamped into the box).
GaState ga_init_from(std::vector<std::vector<double>> population, const SearchSpace& space,
                     const OptimizerConfig& cfg, const Objective& f);
void ga_step(GaState& state, const SearchSpace& space, const OptimizerConfig& cfg,
             const Objective& f);

struct AbcState {
  std::vector<std::vector<double>> sources;
  std::vector<double> fitness;
  std::vector<std::size_t> trials;
  Wolf best;
  std::size_t evaluations = 0;
  Rng rng;
};

AbcState abc_init(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f);
void abc_step(AbcState& state, const SearchSpace& space, const OptimizerConfig& cfg,
              const Objective& f);

/// PSO, GA or ABC according to cfg.algorithm. Throws ConfigError for GWO.
RunTrace run_baseline(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f);

/// Dispatches on cfg.algorithm.
RunTrace minimize(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f);

}  // namespace gwosae

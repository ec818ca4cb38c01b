#include "gwosae/optimizers.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "gwosae/errors.hpp"

namespace gwosae {

namespace {

constexpr std::array<std::string_view, 12> kParamKeys = {
    "gwo.a_start",        "gwo.a_end",          "pso.inertia",     "pso.cognitive",
    "pso.social",         "pso.vmax_fraction",  "ga.crossover_rate", "ga.mutation_rate",
    "ga.mutation_sigma",  "ga.tournament_size", "ga.elitism",      "abc.limit",
};

}  // namespace

std::string_view to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::gwo: return "gwo";
    case Algorithm::pso: return "pso";
    case Algorithm::ga: return "ga";
    case Algorithm::abc: return "abc";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view token) {
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "gwo") return Algorithm::gwo;
  if (lower == "pso") return Algorithm::pso;
  if (lower == "ga") return Algorithm::ga;
  if (lower == "abc") return Algorithm::abc;
  throw ConfigError("unknown algorithm '" + std::string(token) + "' (valid: " +
                    std::string(kAlgorithmTokens) + ")");
}

void SearchSpace::validate() const {
  if (dim < 1) throw ConfigError("search space dimension must be at least 1");
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw ConfigError("search space bounds must be finite with lo < hi");
  }
}

bool SearchSpace::contains(std::span<const double> x) const noexcept {
  if (x.size() != dim) return false;
  return std::all_of(x.begin(), x.end(), [&](double v) { return v >= lo && v <= hi; });
}

void SearchSpace::clamp(std::span<double> x) const noexcept {
  for (double& v : x) v = std::clamp(v, lo, hi);
}

std::span<const std::string_view> known_param_keys() noexcept { return kParamKeys; }

double OptimizerConfig::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void OptimizerConfig::validate() const {
  if (population_size < 4) {
    throw ConfigError("population size must be at least 4 (three leaders plus one follower)");
  }
  if (max_iterations < 1) throw ConfigError("max iterations must be at least 1");
  for (const auto& [key, value] : params) {
    if (std::find(kParamKeys.begin(), kParamKeys.end(), key) == kParamKeys.end()) {
      throw ConfigError("unknown optimizer parameter '" + key + "'");
    }
    if (!std::isfinite(value)) throw ConfigError("optimizer parameter '" + key + "' is not finite");
  }
  const double a_start = param("gwo.a_start", 2.0);
  const double a_end = param("gwo.a_end", 0.0);
  if (a_start < 0.0 || a_start > 2.0 || a_end < 0.0 || a_end > 2.0) {
    throw ConfigError("gwo.a_start and gwo.a_end must lie in [0, 2]");
  }
  const double pc = param("ga.crossover_rate", 0.9);
  if (pc < 0.0 || pc > 1.0) throw ConfigError("ga.crossover_rate must lie in [0, 1]");
  const double pm = param("ga.mutation_rate", 0.0);
  if (pm < 0.0 || pm > 1.0) throw ConfigError("ga.mutation_rate must lie in [0, 1]");
  if (param("ga.mutation_sigma", 0.05) < 0.0) throw ConfigError("ga.mutation_sigma must be >= 0");
  const double tour = param("ga.tournament_size", 3.0);
  if (tour < 1.0 || tour != std::floor(tour)) {
    throw ConfigError("ga.tournament_size must be a positive integer");
  }
  const double elite = param("ga.elitism", 1.0);
  if (elite < 0.0 || elite != std::floor(elite) ||
      elite >= static_cast<double>(population_size)) {
    throw ConfigError("ga.elitism must be an integer in [0, population)");
  }
  if (param("pso.vmax_fraction", 0.5) <= 0.0) throw ConfigError("pso.vmax_fraction must be > 0");
  if (param("abc.limit", 1.0) < 0.0) throw ConfigError("abc.limit must be >= 0");
}

RunTrace minimize(const SearchSpace& space, const OptimizerConfig& cfg, const Objective& f) {
  return cfg.algorithm == Algorithm::gwo ? run_gwo(space, cfg, f) : run_baseline(space, cfg, f);
}

}  // namespace gwosae

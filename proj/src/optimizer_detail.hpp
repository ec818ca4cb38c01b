#pragma once

#include <chrono>
#include <limits>
#include <vector>

#include "gwosae/optimizers.hpp"

namespace gwosae::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline std::vector<std::vector<double>> random_population(const SearchSpace& space,
                                                          std::size_t count, Rng& rng) {
  std::vector<std::vector<double>> pop(count);
  for (auto& x : pop) x = uniform_in(rng, space.lo, space.hi, space.dim);
  return pop;
}

inline std::vector<double> evaluate_all(const OptimizerConfig& cfg, const Objective& f,
                                        const std::vector<std::vector<double>>& positions) {
  std::vector<double> fitness(positions.size());
  evaluate_batch(cfg.execution, f, positions, fitness);
  return fitness;
}

/// Replaces best when the candidate is strictly fitter.
inline void offer_best(Wolf& best, const std::vector<double>& position, double fitness) {
  if (fitness < best.fitness) {
    best.position = position;
    best.fitness = fitness;
  }
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace gwosae::detail

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "doctest.h"

#include "gwosae/errors.hpp"
#include "gwosae/optimizers.hpp"
#include "oracles.hpp"

using namespace gwosae;

namespace {

double sphere(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}

double rastrigin(std::span<const double> x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10.0 * std::cos(2 * M_PI * v);
  return s;
}

OptimizerConfig config(Algorithm algo, std::size_t pop, std::size_t iters, std::uint64_t seed) {
  OptimizerConfig c;
  c.algorithm = algo;
  c.population_size = pop;
  c.max_iterations = iters;
  c.seed = seed;
  return c;
}

bool non_increasing(const std::vector<double>& t) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] > t[i - 1]) return false;
  }
  return true;
}

constexpr Algorithm kAll[] = {Algorithm::gwo, Algorithm::pso, Algorithm::ga, Algorithm::abc};

}  // namespace

TEST_CASE("algorithm tokens") {
  CHECK(parse_algorithm("gwo") == Algorithm::gwo);
  CHECK(parse_algorithm("PSO") == Algorithm::pso);
  CHECK(parse_algorithm("ga") == Algorithm::ga);
  CHECK(parse_algorithm("abc") == Algorithm::abc);
  for (auto a : kAll) CHECK(parse_algorithm(to_string(a)) == a);
  try {
    parse_algorithm("xyz");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("gwo, pso, ga, abc") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  auto c = config(Algorithm::gwo, 3, 10, 0);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.population_size = 4;
  CHECK_NOTHROW(c.validate());
  c.max_iterations = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.max_iterations = 1;
  c.params["pso.nonsense"] = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  SearchSpace s{3, 1.0, 1.0};
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("gwo_init") {
  const SearchSpace space{1, -20, 20};
  const auto cfg = config(Algorithm::gwo, 4, 10, 1);
  const Objective f = sphere;
  const GwoState s = gwo_init(space, cfg, f);
  REQUIRE(s.population.size() == 4);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : s.population) {
    CHECK(space.contains(w.position));
    best = std::min(best, w.fitness);
  }
  CHECK(s.alpha.fitness == best);
  CHECK(s.alpha.fitness <= s.beta.fitness);
  CHECK(s.beta.fitness <= s.delta.fitness);
  CHECK(s.evaluations == 4);
  CHECK(s.a_coef == 2.0);

  const GwoState again = gwo_init(space, cfg, f);
  for (std::size_t i = 0; i < 4; ++i) CHECK(again.population[i].position == s.population[i].position);
}

TEST_CASE("gwo_init breaks ties by population index") {
  const SearchSpace space{2, -1, 1};
  const Objective flat = [](std::span<const double>) { return 1.0; };
  const GwoState s = gwo_init(space, config(Algorithm::gwo, 6, 5, 3), flat);
  CHECK(s.alpha.position == s.population[0].position);
  CHECK(s.beta.position == s.population[1].position);
  CHECK(s.delta.position == s.population[2].position);
}

TEST_CASE("gwo_move arithmetic") {
  Rng rng(4);
  // a = 0 makes A vanish, so the move is the leader average.
  const std::vector<double> x{7, -2}, lead{1.5, 3.0};
  CHECK(gwo_move(x, lead, lead, lead, 0.0, rng) == lead);
  const std::vector<double> a{0}, b{3}, d{3}, here{-5};
  CHECK(gwo_move(here, a, b, d, 0.0, rng)[0] == doctest::Approx(2.0).epsilon(1e-15));
  // At consensus D = |C-1| * X, which only vanishes through A; still the
  // candidate stays within 2a*(2+1)*|X| of the leader.
  const std::vector<double> c{1.0};
  for (int i = 0; i < 100; ++i) {
    const double v = gwo_move(c, c, c, c, 0.5, rng)[0];
    CHECK(std::abs(v - 1.0) <= 0.5 * 3.0 + 1e-12);
  }
}

TEST_CASE("gwo_step keeps leaders ordered and greedy") {
  const SearchSpace space{6, -20, 20};
  const auto cfg = config(Algorithm::gwo, 10, 40, 9);
  const Objective f = rastrigin;
  GwoState s = gwo_init(space, cfg, f);
  double prev_alpha = s.alpha.fitness;
  for (std::size_t t = 0; t < cfg.max_iterations; ++t) {
    gwo_step(s, space, cfg, f);
    CHECK(s.alpha.fitness <= prev_alpha);
    CHECK(s.alpha.fitness <= s.beta.fitness);
    CHECK(s.beta.fitness <= s.delta.fitness);
    for (const auto& w : s.population) {
      CHECK(space.contains(w.position));
      CHECK(s.alpha.fitness <= w.fitness);
    }
    CHECK(s.a_coef >= 0.0);
    CHECK(s.a_coef <= 2.0);
    prev_alpha = s.alpha.fitness;
  }
  CHECK(s.a_coef == doctest::Approx(0.0));
  CHECK(s.iteration == cfg.max_iterations);
}

TEST_CASE("gwo a schedule is configurable") {
  const SearchSpace space{2, -5, 5};
  auto cfg = config(Algorithm::gwo, 5, 4, 1);
  cfg.params["gwo.a_start"] = 2.0;
  cfg.params["gwo.a_end"] = 1.0;
  const Objective f = sphere;
  GwoState s = gwo_init(space, cfg, f);
  gwo_step(s, space, cfg, f);
  CHECK(s.a_coef == doctest::Approx(1.75));
  for (int i = 0; i < 3; ++i) gwo_step(s, space, cfg, f);
  CHECK(s.a_coef == doctest::Approx(1.0));
}

TEST_CASE("gwo on sphere") {
  const SearchSpace space{5, -20, 20};
  const auto trace = run_gwo(space, config(Algorithm::gwo, 30, 200, 42), sphere);
  CHECK(trace.best_fitness_per_iteration.size() == 200);
  CHECK(trace.final_best() < 1e-2);
  CHECK(trace.evaluations == 30 * 201);
  CHECK(sphere(trace.best_position) == trace.final_best());
}

TEST_CASE("gwo beats random search tenfold") {
  const SearchSpace space{10, -20, 20};
  double gwo_sum = 0, rs_sum = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto trace = run_gwo(space, config(Algorithm::gwo, 30, 199, seed), sphere);
    REQUIRE(trace.evaluations == 6000);
    gwo_sum += trace.final_best();
    rs_sum += oracle::random_search_sphere(10, -20, 20, trace.evaluations, seed);
  }
  CHECK(gwo_sum * 10 < rs_sum);
}

TEST_CASE("single iteration run") {
  const SearchSpace space{3, -20, 20};
  for (auto algo : kAll) {
    const auto trace = minimize(space, config(algo, 8, 1, 5), sphere);
    CHECK(trace.best_fitness_per_iteration.size() == 1);
  }
}

TEST_CASE("runs are deterministic and thread-count independent") {
  const SearchSpace space{7, -20, 20};
  for (auto algo : kAll) {
    auto cfg = config(algo, 12, 30, 17);
    const auto a = minimize(space, cfg, rastrigin);
    const auto b = minimize(space, cfg, rastrigin);
    cfg.execution = Execution::serial;
    const auto c = minimize(space, cfg, rastrigin);
    CHECK(a.best_fitness_per_iteration == b.best_fitness_per_iteration);
    CHECK(a.best_position == b.best_position);
    CHECK(a.best_fitness_per_iteration == c.best_fitness_per_iteration);
    CHECK(a.best_position == c.best_position);
  }
}

TEST_CASE("traces are monotone and positions stay in the box") {
  for (auto algo : kAll) {
    const SearchSpace space{4, -3, 2};
    std::mutex mu;
    bool inside = true;
    std::size_t calls = 0;
    const Objective f = [&](std::span<const double> x) {
      std::lock_guard lock(mu);
      ++calls;
      if (!space.contains(x)) inside = false;
      return rastrigin(x);
    };
    const auto trace = minimize(space, config(algo, 10, 50, 23), f);
    CHECK(non_increasing(trace.best_fitness_per_iteration));
    CHECK(inside);
    CHECK(calls == trace.evaluations);
  }
}

TEST_CASE("evaluation budgets") {
  const SearchSpace space{3, -20, 20};
  const std::size_t pop = 10, iters = 25;
  CHECK(minimize(space, config(Algorithm::gwo, pop, iters, 1), sphere).evaluations ==
        pop * (1 + iters));
  CHECK(minimize(space, config(Algorithm::pso, pop, iters, 1), sphere).evaluations ==
        pop * (1 + iters));
  CHECK(minimize(space, config(Algorithm::ga, pop, iters, 1), sphere).evaluations ==
        pop + iters * (pop - 1));
  const auto abc = minimize(space, config(Algorithm::abc, pop, iters, 1), sphere).evaluations;
  CHECK(abc >= pop / 2 + iters * pop);
  CHECK(abc <= pop / 2 + iters * pop + iters);
}

TEST_CASE("ga without variation keeps its best constant") {
  const SearchSpace space{4, -20, 20};
  auto cfg = config(Algorithm::ga, 8, 20, 2);
  cfg.params["ga.mutation_rate"] = 0.0;
  std::vector<std::vector<double>> pop(8, std::vector<double>{1, -2, 3, 0.5});
  const Objective f = sphere;
  GaState s = ga_init_from(pop, space, cfg, f);
  const double start = s.best.fitness;
  for (int t = 0; t < 20; ++t) {
    ga_step(s, space, cfg, f);
    CHECK(s.best.fitness == start);
    for (const auto& p : s.population) CHECK(p == pop[0]);
  }
}

TEST_CASE("pso converges on a small sphere") {
  const SearchSpace space{2, -20, 20};
  const auto trace = minimize(space, config(Algorithm::pso, 20, 100, 8), sphere);
  CHECK(non_increasing(trace.best_fitness_per_iteration));
  CHECK(trace.final_best() < 1e-3);
}

TEST_CASE("NaN fitness never leads") {
  const SearchSpace space{2, -1, 1};
  const Objective f = [](std::span<const double> x) {
    return x[0] > 0 ? std::numeric_limits<double>::quiet_NaN() : sphere(x);
  };
  for (auto algo : kAll) {
    const auto trace = minimize(space, config(algo, 10, 20, 4), f);
    CHECK(std::isfinite(trace.final_best()));
    CHECK(trace.best_position[0] <= 0.0);
  }
}

TEST_CASE("run_baseline rejects gwo") {
  const SearchSpace space{2, -1, 1};
  CHECK_THROWS_AS(run_baseline(space, config(Algorithm::gwo, 5, 2, 0), sphere), ConfigError);
}

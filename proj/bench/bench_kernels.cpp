// Serial reference vs OpenMP kernels.
//   ./bench_kernels --benchmark_filter=affine
// Set OMP_NUM_THREADS to compare thread counts.

#include <benchmark/benchmark.h>

#include "gwosae/autoencoder.hpp"
#include "gwosae/kernels.hpp"
#include "gwosae/rng.hpp"

using namespace gwosae;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "omp"); }

void BM_affine_sigmoid(benchmark::State& state) {
  const std::size_t rows = 42, in = static_cast<std::size_t>(state.range(1)), out = in / 4;
  Rng rng(1);
  const auto x = uniform_in(rng, 0, 1, rows * in);
  const auto w = uniform_in(rng, -20, 20, out * in);
  const auto b = uniform_in(rng, -20, 20, out);
  std::vector<double> h(rows * out);
  for (auto _ : state) {
    affine_sigmoid(mode(state), x, rows, in, w, b, h);
    benchmark::DoNotOptimize(h.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rows * in * out));
  label(state);
}
BENCHMARK(BM_affine_sigmoid)->ArgsProduct({{0, 1}, {200, 2000}});

// One autoencoder cost evaluation with the whole forward pass in the chosen mode.
void BM_autoencoder_cost(benchmark::State& state) {
  AutoencoderSpec spec;
  spec.input_dim = static_cast<std::size_t>(state.range(1));
  spec.hidden_dim = spec.input_dim / 4;
  Rng rng(2);
  Matrix x(42, spec.input_dim);
  for (auto& v : x.values()) v = rng.uniform();
  const auto objective = make_objective(spec, x, mode(state));
  const auto v = uniform_in(rng, -20, 20, spec.param_count());
  for (auto _ : state) benchmark::DoNotOptimize(objective(v));
  label(state);
}
BENCHMARK(BM_autoencoder_cost)->ArgsProduct({{0, 1}, {200, 2000}});

// Population-level parallelism: one optimizer iteration's worth of evaluations.
void BM_evaluate_batch(benchmark::State& state) {
  AutoencoderSpec spec;
  spec.input_dim = 200;
  spec.hidden_dim = 50;
  Rng rng(3);
  Matrix x(42, spec.input_dim);
  for (auto& v : x.values()) v = rng.uniform();
  const auto objective = make_objective(spec, x);
  std::vector<std::vector<double>> pop(30);
  for (auto& p : pop) p = uniform_in(rng, -20, 20, spec.param_count());
  std::vector<double> fitness(pop.size());
  for (auto _ : state) {
    evaluate_batch(mode(state), objective, pop, fitness);
    benchmark::DoNotOptimize(fitness.data());
  }
  label(state);
}
BENCHMARK(BM_evaluate_batch)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();

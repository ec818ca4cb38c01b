#include <omp.h>

#include <cmath>
#include <exception>
#include <limits>
#include <vector>

#include "gwosae/kernels.hpp"
#include "gwosae/matrix.hpp"

namespace gwosae::omp {

namespace {

// Below this many multiply-adds a team costs more than it saves.
constexpr std::size_t kMinParallelWork = 1 << 15;

}  // namespace

void affine_sigmoid(std::span<const double> x, std::size_t rows, std::size_t in_dim,
                    std::span<const double> weights, std::span<const double> bias,
                    std::span<double> out) {
  const std::size_t out_dim = bias.size();
  const auto n = static_cast<std::ptrdiff_t>(rows);
  const bool big = rows * out_dim * in_dim >= kMinParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const double* xs = x.data() + s * in_dim;
    double* os = out.data() + s * out_dim;
    for (std::size_t o = 0; o < out_dim; ++o) {
      const double* w = weights.data() + o * in_dim;
      double acc = 0.0;
      for (std::size_t j = 0; j < in_dim; ++j) acc += w[j] * xs[j];
      os[o] = sigmoid(acc + bias[o]);
    }
  }
}

void row_squared_error(std::span<const double> a, std::span<const double> b, std::size_t rows,
                       std::size_t cols, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(rows);
  const bool big = rows * cols >= kMinParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const double* as = a.data() + s * cols;
    const double* bs = b.data() + s * cols;
    double acc = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      const double d = as[k] - bs[k];
      acc += d * d;
    }
    out[s] = acc;
  }
}

void evaluate_batch(const Objective& f, std::span<const std::vector<double>> positions,
                    std::span<double> fitness) {
  const auto n = static_cast<std::ptrdiff_t>(positions.size());
  // Exceptions cannot cross the region boundary; keep the lowest-index one.
  std::vector<std::exception_ptr> errors(positions.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const double v = f(positions[i]);
      fitness[i] = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace gwosae::omp

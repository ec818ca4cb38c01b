#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// gwosae::serial and an OpenMP version in gwosae::omp. Both compute each
// output element with the same arithmetic in the same order, so their
// results are bitwise identical regardless of thread count.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gwosae {

enum class Execution { serial, parallel };

/// Black-box function minimized by the optimizers. Must be safe to call concurrently.
using Objective = std::function<double(std::span<const double>)>;

namespace serial {

/// out[s][o] = sigmoid(bias[o] + sum_j weights[o][j] * x[s][j]).
/// x is rows x in_dim, weights is bias.size() x in_dim, out is rows x bias.size().
void affine_sigmoid(std::span<const double> x, std::size_t rows, std::size_t in_dim,
                    std::span<const double> weights, std::span<const double> bias,
                    std::span<double> out);

/// out[s] = sum_k (a[s][k] - b[s][k])^2.
void row_squared_error(std::span<const double> a, std::span<const double> b, std::size_t rows,
                       std::size_t cols, std::span<double> out);

/// fitness[i] = f(positions[i]).
void evaluate_batch(const Objective& f, std::span<const std::vector<double>> positions,
                    std::span<double> fitness);

}  // namespace serial

namespace omp {

void affine_sigmoid(std::span<const double> x, std::size_t rows, std::size_t in_dim,
                    std::span<const double> weights, std::span<const double> bias,
                    std::span<double> out);

void row_squared_error(std::span<const double> a, std::span<const double> b, std::size_t rows,
                       std::size_t cols, std::span<double> out);

void evaluate_batch(const Objective& f, std::span<const std::vector<double>> positions,
                    std::span<double> fitness);

}  // namespace omp

// Dispatchers.

inline void affine_sigmoid(Execution exec, std::span<const double> x, std::size_t rows,
                           std::size_t in_dim, std::span<const double> weights,
                           std::span<const double> bias, std::span<double> out) {
  if (exec == Execution::parallel) {
    omp::affine_sigmoid(x, rows, in_dim, weights, bias, out);
  } else {
    serial::affine_sigmoid(x, rows, in_dim, weights, bias, out);
  }
}

inline void row_squared_error(Execution exec, std::span<const double> a,
                              std::span<const double> b, std::size_t rows, std::size_t cols,
                              std::span<double> out) {
  if (exec == Execution::parallel) {
    omp::row_squared_error(a, b, rows, cols, out);
  } else {
    serial::row_squared_error(a, b, rows, cols, out);
  }
}

inline void evaluate_batch(Execution exec, const Objective& f,
                           std::span<const std::vector<double>> positions,
                           std::span<double> fitness) {
  if (exec == Execution::parallel) {
    omp::evaluate_batch(f, positions, fitness);
  } else {
    serial::evaluate_batch(f, positions, fitness);
  }
}

}  // namespace gwosae

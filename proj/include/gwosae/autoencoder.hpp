#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gwosae/kernels.hpp"
#include "gwosae/matrix.hpp"

namespace gwosae {

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;

  double clamp(double v) const noexcept { return v < lo ? lo : (v > hi ? hi : v); }
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Shape and sparsity settings of one autoencoder.
struct AutoencoderSpec {
  std::size_t input_dim = 1;
  std::size_t hidden_dim = 1;
  double rho = 0.05;                // target mean activation
  Bounds lambda_bounds{0.0, 1.0};   // L2 weight coefficient range
  Bounds beta_bounds{0.0, 10.0};    // sparsity coefficient range

  /// Throws ArgumentError when an invariant is broken.
  void validate() const;
  /// Length of the flat search vector: 2*h*k + h + k + 2.
  std::size_t param_count() const noexcept;

  friend bool operator==(const AutoencoderSpec&, const AutoencoderSpec&) = default;
};

struct AutoencoderParams {
  Matrix w_enc;               // hidden x input
  std::vector<double> b_enc;  // hidden
  Matrix w_dec;               // input x hidden
  std::vector<double> b_dec;  // input
  double lambda = 0.0;
  double beta = 0.0;

  static AutoencoderParams zeros(const AutoencoderSpec& spec);

  std::size_t input_dim() const noexcept { return w_enc.cols(); }
  std::size_t hidden_dim() const noexcept { return w_enc.rows(); }

  friend bool operator==(const AutoencoderParams&, const AutoencoderParams&) = default;
};

/// Flat search-space encoding of AutoencoderParams.
using ParamVector = std::vector<double>;

/// Layout: w_enc row-major, b_enc, w_dec row-major, b_dec, lambda, beta.
ParamVector flatten(const AutoencoderParams& params);
/// Inverse of flatten. lambda and beta are clamped into the spec bounds.
AutoencoderParams unflatten(const AutoencoderSpec& spec, std::span<const double> v);

/// Hidden activations, one row per sample of x.
Matrix encode(const AutoencoderParams& params, const Matrix& x,
              Execution exec = Execution::serial);
/// Reconstruction from hidden activations.
Matrix decode(const AutoencoderParams& params, const Matrix& h,
              Execution exec = Execution::serial);

/// Bernoulli KL divergence between target rho and observed rho_hat.
/// rho_hat is clamped into [1e-8, 1-1e-8] first.
double kl_term(double rho, double rho_hat);
/// Sum over hidden units of kl_term(rho, mean activation of the unit).
double sparsity_penalty(const AutoencoderSpec& spec, const Matrix& h);
/// Half the sum of squared encoder and decoder weights. Biases excluded.
double l2_penalty(const AutoencoderParams& params);
/// (1/N) * sum over samples and attributes of (x - x_hat)^2.
double reconstruction_error(const Matrix& x, const Matrix& x_hat);

/// reconstruction_error + lambda * l2_penalty + beta * sparsity_penalty.
double cost(const AutoencoderSpec& spec, const AutoencoderParams& params, const Matrix& x,
            Execution exec = Execution::serial);

/// v -> cost(spec, unflatten(spec, v), x) without materializing the params.
/// The returned function owns a copy of x and is safe to call concurrently.
Objective make_objective(const AutoencoderSpec& spec, const Matrix& x,
                         Execution inner = Execution::serial);

}  // namespace gwosae

#include "gwosae/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "gwosae/errors.hpp"

namespace gwosae {

namespace {

constexpr double kRhoHatEps = 1e-8;

// Non-owning view of one autoencoder's parameters.
struct ParamView {
  std::span<const double> w_enc;
  std::span<const double> b_enc;
  std::span<const double> w_dec;
  std::span<const double> b_dec;
  double lambda;
  double beta;
};

ParamView view_of(const AutoencoderParams& p) {
  return {p.w_enc.values(), p.b_enc, p.w_dec.values(), p.b_dec, p.lambda, p.beta};
}

ParamView view_of(const AutoencoderSpec& spec, std::span<const double> v) {
  const std::size_t k = spec.input_dim;
  const std::size_t h = spec.hidden_dim;
  std::size_t at = 0;
  auto take = [&](std::size_t n) {
    auto s = v.subspan(at, n);
    at += n;
    return s;
  };
  ParamView view{};
  view.w_enc = take(h * k);
  view.b_enc = take(h);
  view.w_dec = take(k * h);
  view.b_dec = take(k);
  view.lambda = spec.lambda_bounds.clamp(v[at]);
  view.beta = spec.beta_bounds.clamp(v[at + 1]);
  return view;
}

void check_length(const AutoencoderSpec& spec, std::size_t n) {
  if (n != spec.param_count()) {
    throw ShapeError("parameter vector length " + std::to_string(n) + " does not match " +
                     std::to_string(spec.param_count()) + " required by a " +
                     std::to_string(spec.input_dim) + "-" + std::to_string(spec.hidden_dim) +
                     " autoencoder");
  }
}

double half_sum_squares(std::span<const double> w) {
  double acc = 0.0;
  for (double x : w) acc += x * x;
  return 0.5 * acc;
}

double sparsity_from_activations(double rho, std::span<const double> h, std::size_t rows,
                                 std::size_t hidden) {
  if (rows == 0) throw ArgumentError("sparsity penalty needs at least one sample");
  std::vector<double> mean(hidden, 0.0);
  for (std::size_t s = 0; s < rows; ++s) {
    const double* hs = h.data() + s * hidden;
    for (std::size_t i = 0; i < hidden; ++i) mean[i] += hs[i];
  }
  double total = 0.0;
  for (std::size_t i = 0; i < hidden; ++i) {
    total += kl_term(rho, mean[i] / static_cast<double>(rows));
  }
  return total;
}

double cost_of(const AutoencoderSpec& spec, const ParamView& p, const Matrix& x, Execution exec) {
  const std::size_t n = x.rows();
  const std::size_t k = spec.input_dim;
  const std::size_t h = spec.hidden_dim;
  if (n == 0) throw ArgumentError("cost needs at least one sample");
  if (x.cols() != k) {
    throw ShapeError("input has " + std::to_string(x.cols()) + " columns, autoencoder expects " +
                     std::to_string(k));
  }
  std::vector<double> hidden(n * h);
  std::vector<double> recon(n * k);
  std::vector<double> per_row(n);
  affine_sigmoid(exec, x.values(), n, k, p.w_enc, p.b_enc, hidden);
  affine_sigmoid(exec, hidden, n, h, p.w_dec, p.b_dec, recon);
  row_squared_error(exec, x.values(), recon, n, k, per_row);

  double sse = 0.0;
  for (double r : per_row) sse += r;
  const double mse = sse / static_cast<double>(n);
  const double l2 = half_sum_squares(p.w_enc) + half_sum_squares(p.w_dec);
  const double sparse = sparsity_from_activations(spec.rho, hidden, n, h);
  return mse + p.lambda * l2 + p.beta * sparse;
}

}  // namespace

void AutoencoderSpec::validate() const {
  if (input_dim < 1 || hidden_dim < 1) {
    throw ArgumentError("autoencoder dimensions must be at least 1");
  }
  if (!(rho > 0.0 && rho < 1.0)) {
    throw ArgumentError("rho must lie strictly between 0 and 1");
  }
  for (const Bounds* b : {&lambda_bounds, &beta_bounds}) {
    if (!(b->lo >= 0.0) || !(b->lo <= b->hi)) {
      throw ArgumentError("coefficient bounds must satisfy 0 <= lo <= hi");
    }
  }
}

std::size_t AutoencoderSpec::param_count() const noexcept {
  return 2 * hidden_dim * input_dim + hidden_dim + input_dim + 2;
}

AutoencoderParams AutoencoderParams::zeros(const AutoencoderSpec& spec) {
  AutoencoderParams p;
  p.w_enc = Matrix(spec.hidden_dim, spec.input_dim);
  p.b_enc.assign(spec.hidden_dim, 0.0);
  p.w_dec = Matrix(spec.input_dim, spec.hidden_dim);
  p.b_dec.assign(spec.input_dim, 0.0);
  return p;
}

ParamVector flatten(const AutoencoderParams& params) {
  ParamVector v;
  v.reserve(params.w_enc.size() + params.b_enc.size() + params.w_dec.size() +
            params.b_dec.size() + 2);
  const auto append = [&v](std::span<const double> s) { v.insert(v.end(), s.begin(), s.end()); };
  append(params.w_enc.values());
  append(params.b_enc);
  append(params.w_dec.values());
  append(params.b_dec);
  v.push_back(params.lambda);
  v.push_back(params.beta);
  return v;
}

AutoencoderParams unflatten(const AutoencoderSpec& spec, std::span<const double> v) {
  check_length(spec, v.size());
  const ParamView view = view_of(spec, v);
  AutoencoderParams p;
  p.w_enc = Matrix(spec.hidden_dim, spec.input_dim,
                   std::vector<double>(view.w_enc.begin(), view.w_enc.end()));
  p.b_enc.assign(view.b_enc.begin(), view.b_enc.end());
  p.w_dec = Matrix(spec.input_dim, spec.hidden_dim,
                   std::vector<double>(view.w_dec.begin(), view.w_dec.end()));
  p.b_dec.assign(view.b_dec.begin(), view.b_dec.end());
  p.lambda = view.lambda;
  p.beta = view.beta;
  return p;
}

Matrix encode(const AutoencoderParams& params, const Matrix& x, Execution exec) {
  if (x.cols() != params.input_dim()) {
    throw ShapeError("encode: input is " + x.shape_string() + ", encoder expects " +
                     std::to_string(params.input_dim()) + " columns");
  }
  Matrix h(x.rows(), params.hidden_dim());
  affine_sigmoid(exec, x.values(), x.rows(), x.cols(), params.w_enc.values(), params.b_enc,
                 h.values());
  return h;
}

Matrix decode(const AutoencoderParams& params, const Matrix& h, Execution exec) {
  if (h.cols() != params.hidden_dim()) {
    throw ShapeError("decode: hidden input is " + h.shape_string() + ", decoder expects " +
                     std::to_string(params.hidden_dim()) + " columns");
  }
  Matrix x_hat(h.rows(), params.input_dim());
  affine_sigmoid(exec, h.values(), h.rows(), h.cols(), params.w_dec.values(), params.b_dec,
                 x_hat.values());
  return x_hat;
}

double kl_term(double rho, double rho_hat) {
  const double q = std::clamp(rho_hat, kRhoHatEps, 1.0 - kRhoHatEps);
  return rho * std::log(rho / q) + (1.0 - rho) * std::log((1.0 - rho) / (1.0 - q));
}

double sparsity_penalty(const AutoencoderSpec& spec, const Matrix& h) {
  if (h.rows() == 0) throw ArgumentError("sparsity penalty needs at least one sample");
  if (h.cols() != spec.hidden_dim) {
    throw ShapeError("sparsity penalty: activations are " + h.shape_string() + ", expected " +
                     std::to_string(spec.hidden_dim) + " columns");
  }
  return sparsity_from_activations(spec.rho, h.values(), h.rows(), h.cols());
}

double l2_penalty(const AutoencoderParams& params) {
  return half_sum_squares(params.w_enc.values()) + half_sum_squares(params.w_dec.values());
}

double reconstruction_error(const Matrix& x, const Matrix& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols()) {
    throw ShapeError("reconstruction shape " + x_hat.shape_string() + " differs from input " +
                     x.shape_string());
  }
  if (x.rows() == 0) throw ArgumentError("reconstruction error needs at least one sample");
  std::vector<double> per_row(x.rows());
  serial::row_squared_error(x.values(), x_hat.values(), x.rows(), x.cols(), per_row);
  double sse = 0.0;
  for (double r : per_row) sse += r;
  return sse / static_cast<double>(x.rows());
}

double cost(const AutoencoderSpec& spec, const AutoencoderParams& params, const Matrix& x,
            Execution exec) {
  if (params.input_dim() != spec.input_dim || params.hidden_dim() != spec.hidden_dim ||
      params.b_enc.size() != spec.hidden_dim || params.b_dec.size() != spec.input_dim ||
      params.w_dec.rows() != spec.input_dim || params.w_dec.cols() != spec.hidden_dim) {
    throw ShapeError("autoencoder parameters do not match the spec shape");
  }
  return cost_of(spec, view_of(params), x, exec);
}

Objective make_objective(const AutoencoderSpec& spec, const Matrix& x, Execution inner) {
  spec.validate();
  if (x.rows() == 0) throw ArgumentError("objective needs a nonempty dataset");
  if (x.cols() != spec.input_dim) {
    throw ShapeError("objective: data is " + x.shape_string() + ", autoencoder expects " +
                     std::to_string(spec.input_dim) + " columns");
  }
  auto data = std::make_shared<const Matrix>(x);
  return [spec, data, inner](std::span<const double> v) {
    check_length(spec, v.size());
    return cost_of(spec, view_of(spec, v), *data, inner);
  };
}

}  // namespace gwosae

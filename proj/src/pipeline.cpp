#include "gwosae/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <memory>

#include "gwosae/errors.hpp"
#include "optimizer_detail.hpp"

namespace gwosae {

namespace {

// logits[s][c] = b[c] + sum_i w[c][i] * h[s][i]
std::vector<double> logits_of(const Matrix& w, std::span<const double> b, const Matrix& h) {
  const std::size_t n = h.rows();
  const std::size_t k = w.rows();
  std::vector<double> z(n * k);
  for (std::size_t s = 0; s < n; ++s) {
    const auto hs = h.row(s);
    for (std::size_t c = 0; c < k; ++c) {
      const auto wc = w.row(c);
      double acc = 0.0;
      for (std::size_t i = 0; i < hs.size(); ++i) acc += wc[i] * hs[i];
      z[s * k + c] = acc + b[c];
    }
  }
  return z;
}

void check_softmax_shapes(const Matrix& w, std::span<const double> b, const Matrix& h) {
  if (w.rows() != b.size() || w.cols() != h.cols()) {
    throw ShapeError("softmax layer " + w.shape_string() + " with " + std::to_string(b.size()) +
                     " biases cannot score features " + h.shape_string());
  }
}

double cross_entropy_of(std::span<const double> z, std::size_t k, const Labels& y) {
  double total = 0.0;
  for (std::size_t s = 0; s < y.size(); ++s) {
    const double* zs = z.data() + s * k;
    const double m = *std::max_element(zs, zs + k);
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) sum += std::exp(zs[c] - m);
    total += (m + std::log(sum)) - zs[y[s]];
  }
  return total / static_cast<double>(y.size());
}

// Splits a flat softmax vector into w (classes x hidden, row-major) and b.
void unpack_softmax(std::span<const double> v, std::size_t classes, std::size_t hidden, Matrix& w,
                    std::vector<double>& b) {
  w = Matrix(classes, hidden, std::vector<double>(v.begin(), v.begin() + classes * hidden));
  b.assign(v.begin() + classes * hidden, v.end());
}

RunTrace train_softmax_gradient(const PipelineSpec& spec, const Matrix& h, const Labels& y,
                                Matrix& w_out, std::vector<double>& b_out) {
  const detail::Stopwatch clock;
  const std::size_t k = spec.class_count();
  const std::size_t d = h.cols();
  const std::size_t n = h.rows();
  Matrix w(k, d);
  std::vector<double> b(k, 0.0);
  Matrix best_w = w;
  std::vector<double> best_b = b;
  double best = cross_entropy(w, b, h, y);

  RunTrace trace;
  trace.evaluations = 1;
  for (std::size_t t = 0; t < spec.optimizer.max_iterations; ++t) {
    const Matrix p = softmax_probabilities(w, b, h);
    Matrix gw(k, d);
    std::vector<double> gb(k, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t c = 0; c < k; ++c) {
        const double r = (p(s, c) - (y[s] == c ? 1.0 : 0.0)) / static_cast<double>(n);
        gb[c] += r;
        const auto hs = h.row(s);
        auto gc = gw.row(c);
        for (std::size_t i = 0; i < d; ++i) gc[i] += r * hs[i];
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      b[c] -= spec.softmax_learning_rate * gb[c];
      auto wc = w.row(c);
      const auto gc = gw.row(c);
      for (std::size_t i = 0; i < d; ++i) wc[i] -= spec.softmax_learning_rate * gc[i];
    }
    const double loss = cross_entropy(w, b, h, y);
    ++trace.evaluations;
    if (loss < best) {
      best = loss;
      best_w = w;
      best_b = b;
    }
    trace.best_fitness_per_iteration.push_back(best);
  }
  trace.best_position = best_w.storage();
  trace.best_position.insert(trace.best_position.end(), best_b.begin(), best_b.end());
  trace.wall_time_seconds = clock.seconds();
  w_out = std::move(best_w);
  b_out = std::move(best_b);
  return trace;
}

}  // namespace

std::string_view to_string(SoftmaxTrainer trainer) noexcept {
  return trainer == SoftmaxTrainer::gradient ? "gradient" : "metaheuristic";
}

SoftmaxTrainer parse_softmax_trainer(std::string_view token) {
  if (token == "metaheuristic") return SoftmaxTrainer::metaheuristic;
  if (token == "gradient") return SoftmaxTrainer::gradient;
  throw ConfigError("unknown softmax trainer '" + std::string(token) +
                    "' (valid: metaheuristic, gradient)");
}

void PipelineSpec::validate() const {
  if (layer_dims.size() != 4) {
    throw ConfigError("layer dims must have exactly 4 elements (input,hidden1,hidden2,classes), got " +
                      std::to_string(layer_dims.size()));
  }
  for (auto d : layer_dims) {
    if (d < 1) throw ConfigError("every layer dimension must be at least 1");
  }
  if (layer_dims[3] < 2) throw ConfigError("a classifier needs at least 2 classes");
  if (!(search_lo < search_hi)) throw ConfigError("search box needs lo < hi");
  if (!(softmax_learning_rate > 0.0)) throw ConfigError("softmax learning rate must be > 0");
  optimizer.validate();
  for (std::size_t l = 0; l < 2; ++l) {
    try {
      autoencoder_spec(l).validate();
    } catch (const ArgumentError& e) {
      throw ConfigError("autoencoder " + std::to_string(l + 1) + ": " + e.what());
    }
  }
}

std::vector<std::string> PipelineSpec::warnings() const {
  std::vector<std::string> out;
  if (layer_dims.size() == 4) {
    if (layer_dims[1] > layer_dims[0]) {
      out.push_back("hidden1 (" + std::to_string(layer_dims[1]) + ") is wider than the input (" +
                    std::to_string(layer_dims[0]) + ")");
    }
    if (layer_dims[2] > layer_dims[1]) {
      out.push_back("hidden2 (" + std::to_string(layer_dims[2]) + ") is wider than hidden1 (" +
                    std::to_string(layer_dims[1]) + "); the stack expands instead of reducing");
    }
  }
  return out;
}

AutoencoderSpec PipelineSpec::autoencoder_spec(std::size_t layer) const {
  AutoencoderSpec s;
  s.input_dim = layer_dims.at(layer);
  s.hidden_dim = layer_dims.at(layer + 1);
  s.rho = layers.at(layer).rho;
  s.lambda_bounds = layers.at(layer).lambda_bounds;
  s.beta_bounds = layers.at(layer).beta_bounds;
  return s;
}

std::uint64_t stage_seed(std::uint64_t master_seed, std::size_t stage) noexcept {
  return derive_seed(master_seed, stage);
}

void min_max(const Matrix& x, std::vector<double>& lo, std::vector<double>& hi) {
  if (x.rows() == 0) throw ArgumentError("cannot compute statistics of an empty matrix");
  lo.assign(x.row(0).begin(), x.row(0).end());
  hi = lo;
  for (std::size_t s = 1; s < x.rows(); ++s) {
    const auto r = x.row(s);
    for (std::size_t j = 0; j < r.size(); ++j) {
      lo[j] = std::min(lo[j], r[j]);
      hi[j] = std::max(hi[j], r[j]);
    }
  }
}

Matrix normalize(const Matrix& x, std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != x.cols() || hi.size() != x.cols()) {
    throw ShapeError("normalization statistics cover " + std::to_string(lo.size()) +
                     " columns, data has " + std::to_string(x.cols()));
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t s = 0; s < x.rows(); ++s) {
    const auto in = x.row(s);
    auto o = out.row(s);
    for (std::size_t j = 0; j < in.size(); ++j) {
      const double range = hi[j] - lo[j];
      o[j] = range > 0.0 ? (in[j] - lo[j]) / range : 0.0;
    }
  }
  return out;
}

Matrix softmax_probabilities(const Matrix& w, std::span<const double> b, const Matrix& h) {
  check_softmax_shapes(w, b, h);
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  const std::size_t k = w.rows();
  const auto z = logits_of(w, b, h);
  Matrix p(h.rows(), k);
  for (std::size_t s = 0; s < h.rows(); ++s) {
    const double* zs = z.data() + s * k;
    const double m = *std::max_element(zs, zs + k);
    double sum = 0.0;
    auto ps = p.row(s);
    for (std::size_t c = 0; c < k; ++c) {
      ps[c] = std::exp(zs[c] - m);
      sum += ps[c];
    }
    for (auto& v : ps) v = std::clamp(v / sum, kLow, kHigh);
  }
  return p;
}

double cross_entropy(const Matrix& w, std::span<const double> b, const Matrix& h,
                     const Labels& y) {
  check_softmax_shapes(w, b, h);
  if (y.size() != h.rows() || y.empty()) {
    throw ShapeError("cross entropy needs one label per feature row");
  }
  for (auto label : y) {
    if (label >= w.rows()) throw ArgumentError("label index outside the softmax classes");
  }
  return cross_entropy_of(logits_of(w, b, h), w.rows(), y);
}

TrainingOutcome train(const PipelineSpec& spec, const Matrix& x_train, const Labels& y_train,
                      const std::vector<std::string>& label_map, std::uint64_t master_seed) {
  const detail::Stopwatch clock;
  spec.validate();
  if (x_train.cols() != spec.input_dim()) {
    throw ShapeError("training data has " + std::to_string(x_train.cols()) +
                     " features, layer dims expect " + std::to_string(spec.input_dim()));
  }
  if (x_train.rows() == 0 || y_train.size() != x_train.rows()) {
    throw ShapeError("training data needs one label per nonempty row");
  }
  if (label_map.size() != spec.class_count()) {
    throw ShapeError("label map has " + std::to_string(label_map.size()) +
                     " classes, layer dims expect " + std::to_string(spec.class_count()));
  }
  std::vector<std::size_t> counts(spec.class_count(), 0);
  for (auto y : y_train) {
    if (y >= counts.size()) throw ArgumentError("training label outside the label map");
    ++counts[y];
  }
  const auto present = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
  if (present < 2) throw TrainingError("training labels contain a single class");
  if (present != static_cast<std::ptrdiff_t>(counts.size())) {
    throw TrainingError("every class must appear in the training split");
  }

  TrainingOutcome out;
  TrainedPipeline& model = out.model;
  TrainingReport& report = out.report;
  model.spec = spec;
  model.label_map = label_map;
  report.warnings = spec.warnings();
  min_max(x_train, model.feature_min, model.feature_max);
  const Matrix x = normalize(x_train, model.feature_min, model.feature_max);

  auto run_stage = [&](std::size_t stage, std::size_t dim, const Objective& f) {
    OptimizerConfig cfg = spec.optimizer;
    cfg.seed = stage_seed(master_seed, stage);
    const SearchSpace space{dim, spec.search_lo, spec.search_hi};
    return minimize(space, cfg, f);
  };

  const AutoencoderSpec ae1 = spec.autoencoder_spec(0);
  report.ae1_trace = run_stage(1, ae1.param_count(), make_objective(ae1, x));
  model.encoder1 = unflatten(ae1, report.ae1_trace.best_position);
  const Matrix h1 = encode(model.encoder1, x);

  const AutoencoderSpec ae2 = spec.autoencoder_spec(1);
  report.ae2_trace = run_stage(2, ae2.param_count(), make_objective(ae2, h1));
  model.encoder2 = unflatten(ae2, report.ae2_trace.best_position);
  const Matrix h2 = encode(model.encoder2, h1);

  const std::size_t k = spec.class_count();
  const std::size_t d = h2.cols();
  if (spec.softmax_trainer == SoftmaxTrainer::gradient) {
    report.softmax_trace = train_softmax_gradient(spec, h2, y_train, model.softmax_w,
                                                  model.softmax_b);
  } else {
    auto features = std::make_shared<const Matrix>(h2);
    auto labels = std::make_shared<const Labels>(y_train);
    const Objective f = [features, labels, k, d](std::span<const double> v) {
      Matrix w;
      std::vector<double> b;
      unpack_softmax(v, k, d, w, b);
      return cross_entropy_of(logits_of(w, b, *features), k, *labels);
    };
    report.softmax_trace = run_stage(3, k * d + k, f);
    unpack_softmax(report.softmax_trace.best_position, k, d, model.softmax_w, model.softmax_b);
  }
  report.total_wall_time = clock.seconds();
  return out;
}

Matrix extract_features(const TrainedPipeline& model, const Matrix& x) {
  if (x.cols() != model.spec.input_dim()) {
    throw ShapeError("data has " + std::to_string(x.cols()) + " features, model expects " +
                     std::to_string(model.spec.input_dim()));
  }
  const Matrix xn = normalize(x, model.feature_min, model.feature_max);
  return encode(model.encoder2, encode(model.encoder1, xn));
}

std::size_t argmax(std::span<const double> row) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[best]) best = i;
  }
  return best;
}

Prediction predict(const TrainedPipeline& model, const Matrix& x) {
  Prediction p;
  p.probabilities = softmax_probabilities(model.softmax_w, model.softmax_b,
                                          extract_features(model, x));
  p.labels.resize(x.rows());
  for (std::size_t s = 0; s < x.rows(); ++s) p.labels[s] = argmax(p.probabilities.row(s));
  return p;
}

double accuracy(const Labels& y_true, const Labels& y_pred) {
  if (y_true.empty()) throw ArgumentError("accuracy of an empty label set is undefined");
  if (y_true.size() != y_pred.size()) {
    throw ArgumentError("accuracy needs equal-length label vectors");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) correct += y_true[i] == y_pred[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(y_true.size());
}

Matrix confusion_matrix(const Labels& y_true, const Labels& y_pred, std::size_t n_classes) {
  if (y_true.size() != y_pred.size()) {
    throw ArgumentError("confusion matrix needs equal-length label vectors");
  }
  Matrix m(n_classes, n_classes);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] >= n_classes || y_pred[i] >= n_classes) {
      throw ArgumentError("label " + std::to_string(std::max(y_true[i], y_pred[i])) +
                          " is outside the " + std::to_string(n_classes) + " known classes");
    }
    m(y_true[i], y_pred[i]) += 1.0;
  }
  return m;
}

}  // namespace gwosae

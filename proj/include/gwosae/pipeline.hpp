#pragma once

// Stacked sparse autoencoders with a softmax output layer. Each
// autoencoder is trained in turn by a population optimizer on the cost of
// its own reconstruction; the second one sees the first one's hidden
// activations. The softmax layer is trained last on the second encoder's
// output, either by the same optimizer or by batch gradient descent.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gwosae/autoencoder.hpp"
#include "gwosae/data_io.hpp"
#include "gwosae/matrix.hpp"
#include "gwosae/optimizers.hpp"

namespace gwosae {

enum class SoftmaxTrainer { metaheuristic, gradient };

std::string_view to_string(SoftmaxTrainer trainer) noexcept;
SoftmaxTrainer parse_softmax_trainer(std::string_view token);

/// Sparsity settings for one stacked autoencoder.
struct LayerSettings {
  double rho = 0.05;
  Bounds lambda_bounds{0.0, 1.0};
  Bounds beta_bounds{0.0, 10.0};

  friend bool operator==(const LayerSettings&, const LayerSettings&) = default;
};

struct PipelineSpec {
  /// {input, hidden1, hidden2, classes}.
  std::vector<std::size_t> layer_dims;
  std::array<LayerSettings, 2> layers{};
  /// Template for every stage; each stage gets its own derived seed.
  OptimizerConfig optimizer;
  /// Search box for every stage's parameters.
  double search_lo = -20.0;
  double search_hi = 20.0;
  SoftmaxTrainer softmax_trainer = SoftmaxTrainer::metaheuristic;
  double softmax_learning_rate = 0.5;  // gradient trainer only

  void validate() const;
  /// Non-fatal remarks, e.g. a second hidden layer wider than the first.
  std::vector<std::string> warnings() const;
  AutoencoderSpec autoencoder_spec(std::size_t layer) const;

  std::size_t input_dim() const { return layer_dims.at(0); }
  std::size_t class_count() const { return layer_dims.at(3); }

  friend bool operator==(const PipelineSpec&, const PipelineSpec&) = default;
};

struct TrainedPipeline {
  PipelineSpec spec;
  AutoencoderParams encoder1;
  AutoencoderParams encoder2;
  Matrix softmax_w;                 // classes x hidden2
  std::vector<double> softmax_b;    // classes
  std::vector<double> feature_min;  // per input column, from the training split
  std::vector<double> feature_max;
  std::vector<std::string> label_map;

  friend bool operator==(const TrainedPipeline&, const TrainedPipeline&) = default;
};

struct TrainingReport {
  RunTrace ae1_trace;
  RunTrace ae2_trace;
  RunTrace softmax_trace;
  double total_wall_time = 0.0;
  std::vector<std::string> warnings;
};

struct TrainingOutcome {
  TrainedPipeline model;
  TrainingReport report;
};

struct Prediction {
  Labels labels;
  Matrix probabilities;  // samples x classes
};

/// Seed of training stage 1..3 (AE1, AE2, softmax).
std::uint64_t stage_seed(std::uint64_t master_seed, std::size_t stage) noexcept;

/// Per-column min and max of x.
void min_max(const Matrix& x, std::vector<double>& lo, std::vector<double>& hi);
/// (x - lo) / (hi - lo) per column; constant columns map to 0.
Matrix normalize(const Matrix& x, std::span<const double> lo, std::span<const double> hi);

/// Row-wise softmax of h * w^T + b, every probability kept inside (0,1).
Matrix softmax_probabilities(const Matrix& w, std::span<const double> b, const Matrix& h);
/// Mean negative log-likelihood of the labels.
double cross_entropy(const Matrix& w, std::span<const double> b, const Matrix& h,
                     const Labels& y);

TrainingOutcome train(const PipelineSpec& spec, const Matrix& x_train, const Labels& y_train,
                      const std::vector<std::string>& label_map, std::uint64_t master_seed);

/// Normalized input pushed through both encoders.
Matrix extract_features(const TrainedPipeline& model, const Matrix& x);

Prediction predict(const TrainedPipeline& model, const Matrix& x);

/// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> row) noexcept;

/// Correct predictions over total; equals (TP+TN)/(TP+TN+FP+FN) for two classes.
double accuracy(const Labels& y_true, const Labels& y_pred);
/// counts[i][j] = samples of true class i predicted as j.
Matrix confusion_matrix(const Labels& y_true, const Labels& y_pred, std::size_t n_classes);

}  // namespace gwosae

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "gwosae/data_io.hpp"
#include "gwosae/optimizers.hpp"
#include "gwosae/pipeline.hpp"

namespace gwosae {

inline constexpr int kReportSchemaVersion = 1;

struct ExperimentPlan {
  Dataset dataset;
  PipelineSpec pipeline;  // optimizer.algorithm is overridden per entry of `algorithms`
  std::vector<Algorithm> algorithms{Algorithm::gwo};
  std::size_t repeats = 5;
  std::uint64_t base_seed = 0;
  double train_fraction = 0.7;

  void validate() const;
};

struct RepeatResult {
  std::size_t repeat = 0;
  double test_accuracy = 0.0;
  double wall_time_seconds = 0.0;  // around train() only
  TrainingReport report;
};

struct AlgorithmResult {
  Algorithm algorithm = Algorithm::gwo;
  std::vector<RepeatResult> runs;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation; 0 for one repeat
  double mean_wall_time = 0.0;
};

struct ExperimentResult {
  std::string dataset_name;
  std::size_t features = 0;
  std::size_t instances = 0;
  std::size_t classes = 0;
  std::vector<std::size_t> layer_dims;
  std::size_t population_size = 0;
  std::size_t max_iterations = 0;
  std::size_t repeats = 0;
  std::uint64_t base_seed = 0;
  double train_fraction = 0.7;
  std::vector<AlgorithmResult> algorithms;
};

/// Seed shared by every algorithm for repeat r: drives the split and training.
std::uint64_t repeat_seed(std::uint64_t base_seed, std::size_t repeat) noexcept;

/// For each algorithm and repeat: fresh stratified split, train, test accuracy.
/// Everything except wall times is a function of the plan.
ExperimentResult run_experiment(const ExperimentPlan& plan);

/// Mean and sample standard deviation.
void mean_std(std::span<const double> values, double& mean, double& std_dev);

/// "iteration,best_cost" rows, iteration counted from 1.
void write_curve_csv(const RunTrace& trace, const std::filesystem::path& path);

/// Writes <algo>_r<repeat>_<stage>.csv per run and stage (ae1, ae2, softmax)
/// plus curves_long.csv with columns algorithm,repeat,stage,iteration,best_cost.
/// Returns the files written, combined file last.
std::vector<std::filesystem::path> emit_curves(const ExperimentResult& result,
                                               const std::filesystem::path& out_dir);

/// Per-stage curves of a single training run: <prefix>_<stage>.csv.
std::vector<std::filesystem::path> emit_training_curves(const TrainingReport& report,
                                                        const std::filesystem::path& out_dir,
                                                        const std::string& prefix);

/// Accuracy percent rounded to two decimals, e.g. 0.9902 -> 99.02.
double percent2(double fraction) noexcept;
/// Two-decimal text of a fraction as percent, e.g. 0.9902 -> "99.02".
std::string format_percent(double fraction);

nlohmann::json report_json(const ExperimentResult& result);
std::string report_table(const ExperimentResult& result);

/// Writes the JSON report to out_path and the text table next to it (.txt).
void emit_report(const ExperimentResult& result, const std::filesystem::path& out_path);

/// Full result (without best positions) for later curve re-emission.
nlohmann::json result_to_json(const ExperimentResult& result);
ExperimentResult result_from_json(const nlohmann::json& j);

}  // namespace gwosae

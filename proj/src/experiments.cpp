#include "gwosae/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gwosae/errors.hpp"
#include "gwosae/model_io.hpp"
#include "optimizer_detail.hpp"

namespace gwosae {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTrainStream = 0x747261696eULL;

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}


const RunTrace& stage_trace(const TrainingReport& r, int stage) {
  switch (stage) {
    case 0: return r.ae1_trace;
    case 1: return r.ae2_trace;
    default: return r.softmax_trace;
  }
}

constexpr const char* kStageNames[] = {"ae1", "ae2", "softmax"};

}  // namespace

void ExperimentPlan::validate() const {
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  if (algorithms.empty()) throw ConfigError("at least one algorithm is required");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie strictly between 0 and 1");
  }
  pipeline.validate();
  if (dataset.feature_count() != pipeline.input_dim()) {
    throw ConfigError("dataset has " + std::to_string(dataset.feature_count()) +
                      " features, layer dims expect " + std::to_string(pipeline.input_dim()));
  }
  if (dataset.class_count() != pipeline.class_count()) {
    throw ConfigError("dataset has " + std::to_string(dataset.class_count()) +
                      " classes, layer dims expect " + std::to_string(pipeline.class_count()));
  }
}

std::uint64_t repeat_seed(std::uint64_t base_seed, std::size_t repeat) noexcept {
  return derive_seed(base_seed, repeat);
}

void mean_std(std::span<const double> values, double& mean, double& std_dev) {
  if (values.empty()) throw ArgumentError("mean of an empty list");
  // Shifted by the first value so equal entries give an exact mean and zero spread.
  const double shift = values.front();
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v - shift;
  const double offset = sum / n;
  mean = shift + offset;
  if (values.size() < 2) {
    std_dev = 0.0;
    return;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - shift - offset) * (v - shift - offset);
  std_dev = std::sqrt(ss / (n - 1.0));
}

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  ExperimentResult result;
  result.dataset_name = plan.dataset.name;
  result.features = plan.dataset.feature_count();
  result.instances = plan.dataset.size();
  result.classes = plan.dataset.class_count();
  result.layer_dims = plan.pipeline.layer_dims;
  result.population_size = plan.pipeline.optimizer.population_size;
  result.max_iterations = plan.pipeline.optimizer.max_iterations;
  result.repeats = plan.repeats;
  result.base_seed = plan.base_seed;
  result.train_fraction = plan.train_fraction;

  for (const Algorithm algo : plan.algorithms) {
    AlgorithmResult ar;
    ar.algorithm = algo;
    PipelineSpec spec = plan.pipeline;
    spec.optimizer.algorithm = algo;
    for (std::size_t r = 0; r < plan.repeats; ++r) {
      const std::uint64_t seed = repeat_seed(plan.base_seed, r);
      try {
        const SplitDataset parts = split(plan.dataset, plan.train_fraction, seed);
        const detail::Stopwatch clock;
        TrainingOutcome trained = train(spec, parts.train.features, parts.train.labels,
                                        plan.dataset.label_map, derive_seed(seed, kTrainStream));
        const double seconds = clock.seconds();
        const Prediction pred = predict(trained.model, parts.test.features);
        RepeatResult rr;
        rr.repeat = r;
        rr.test_accuracy = accuracy(parts.test.labels, pred.labels);
        rr.wall_time_seconds = seconds;
        rr.report = std::move(trained.report);
        ar.runs.push_back(std::move(rr));
      } catch (const Error& e) {
        throw TrainingError(std::string(to_string(algo)) + " repeat " + std::to_string(r) + ": " +
                            e.what());
      }
    }
    std::vector<double> acc, times;
    for (const auto& run : ar.runs) {
      acc.push_back(run.test_accuracy);
      times.push_back(run.wall_time_seconds);
    }
    double unused = 0.0;
    mean_std(acc, ar.mean_accuracy, ar.std_accuracy);
    mean_std(times, ar.mean_wall_time, unused);
    result.algorithms.push_back(std::move(ar));
  }
  return result;
}

void write_curve_csv(const RunTrace& trace, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "iteration,best_cost\n";
  for (std::size_t t = 0; t < trace.best_fitness_per_iteration.size(); ++t) {
    out << (t + 1) << ',' << g17(trace.best_fitness_per_iteration[t]) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<std::filesystem::path> emit_curves(const ExperimentResult& result,
                                               const std::filesystem::path& out_dir) {
  if (result.algorithms.empty()) throw ArgumentError("no results to emit");
  make_dir(out_dir);
  std::vector<std::filesystem::path> written;
  const auto long_path = out_dir / "curves_long.csv";
  auto combined = open_out(long_path);
  combined << "algorithm,repeat,stage,iteration,best_cost\n";
  for (const auto& ar : result.algorithms) {
    const std::string algo(to_string(ar.algorithm));
    for (const auto& run : ar.runs) {
      for (int stage = 0; stage < 3; ++stage) {
        const RunTrace& trace = stage_trace(run.report, stage);
        const auto path = out_dir / (algo + "_r" + std::to_string(run.repeat) + "_" +
                                     kStageNames[stage] + ".csv");
        write_curve_csv(trace, path);
        written.push_back(path);
        for (std::size_t t = 0; t < trace.best_fitness_per_iteration.size(); ++t) {
          combined << algo << ',' << run.repeat << ',' << kStageNames[stage] << ',' << (t + 1)
                   << ',' << g17(trace.best_fitness_per_iteration[t]) << '\n';
        }
      }
    }
  }
  if (!combined) throw IoError("failed writing '" + long_path.string() + "'");
  written.push_back(long_path);
  return written;
}

std::vector<std::filesystem::path> emit_training_curves(const TrainingReport& report,
                                                        const std::filesystem::path& out_dir,
                                                        const std::string& prefix) {
  make_dir(out_dir);
  std::vector<std::filesystem::path> written;
  for (int stage = 0; stage < 3; ++stage) {
    const auto path = out_dir / (prefix + "_" + kStageNames[stage] + ".csv");
    write_curve_csv(stage_trace(report, stage), path);
    written.push_back(path);
  }
  return written;
}

double percent2(double fraction) noexcept { return std::round(fraction * 10000.0) / 100.0; }

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", percent2(fraction));
  return buf;
}

json report_json(const ExperimentResult& result) {
  if (result.algorithms.empty()) throw ArgumentError("no results to report");
  json algos = json::array();
  std::string best;
  double best_acc = -1.0;
  for (const auto& ar : result.algorithms) {
    std::vector<double> acc, times;
    std::vector<std::size_t> evals;
    for (const auto& run : ar.runs) {
      acc.push_back(run.test_accuracy);
      times.push_back(run.wall_time_seconds);
      evals.push_back(run.report.ae1_trace.evaluations + run.report.ae2_trace.evaluations +
                      run.report.softmax_trace.evaluations);
    }
    const std::string name(to_string(ar.algorithm));
    if (ar.mean_accuracy > best_acc) {
      best_acc = ar.mean_accuracy;
      best = name;
    }
    algos.push_back({{"algorithm", name},
                     {"accuracies", acc},
                     {"mean_accuracy", ar.mean_accuracy},
                     {"std_accuracy", ar.std_accuracy},
                     {"mean_accuracy_pct", percent2(ar.mean_accuracy)},
                     {"std_accuracy_pct", percent2(ar.std_accuracy)},
                     {"evaluations", evals},
                     {"wall_time", {{"mean_seconds", ar.mean_wall_time}, {"per_repeat_seconds", times}}}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"dataset",
           {{"name", result.dataset_name},
            {"features", result.features},
            {"instances", result.instances},
            {"classes", result.classes}}},
          {"protocol",
           {{"layer_dims", result.layer_dims},
            {"repeats", result.repeats},
            {"train_fraction", result.train_fraction},
            {"base_seed", result.base_seed},
            {"population_size", result.population_size},
            {"max_iterations", result.max_iterations}}},
          {"algorithms", algos},
          {"best_by_mean_accuracy", best}};
}

std::string report_table(const ExperimentResult& result) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %14s %10s %18s\n", "algorithm", "accuracy (%)",
                "std (%)", "mean runtime (s)");
  os << "dataset " << result.dataset_name << " (" << result.features << " features, "
     << result.instances << " instances, " << result.classes << " classes), " << result.repeats
     << " repeats, population " << result.population_size << " x " << result.max_iterations
     << " iterations\n"
     << line;
  for (const auto& ar : result.algorithms) {
    std::snprintf(line, sizeof line, "%-10s %14s %10s %18.3f\n",
                  std::string(to_string(ar.algorithm)).c_str(),
                  format_percent(ar.mean_accuracy).c_str(),
                  format_percent(ar.std_accuracy).c_str(), ar.mean_wall_time);
    os << line;
  }
  return os.str();
}

void emit_report(const ExperimentResult& result, const std::filesystem::path& out_path) {
  const json j = report_json(result);
  if (out_path.has_parent_path()) make_dir(out_path.parent_path());
  {
    auto out = open_out(out_path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing '" + out_path.string() + "'");
  }
  auto txt_path = out_path;
  txt_path.replace_extension(".txt");
  auto out = open_out(txt_path);
  out << report_table(result);
  if (!out) throw IoError("failed writing '" + txt_path.string() + "'");
}

json result_to_json(const ExperimentResult& result) {
  json algos = json::array();
  for (const auto& ar : result.algorithms) {
    json runs = json::array();
    for (const auto& run : ar.runs) {
      runs.push_back({{"repeat", run.repeat},
                      {"test_accuracy", run.test_accuracy},
                      {"wall_time_seconds", run.wall_time_seconds},
                      {"ae1", trace_to_json(run.report.ae1_trace, false)},
                      {"ae2", trace_to_json(run.report.ae2_trace, false)},
                      {"softmax", trace_to_json(run.report.softmax_trace, false)},
                      {"total_wall_time", run.report.total_wall_time}});
    }
    algos.push_back({{"algorithm", std::string(to_string(ar.algorithm))},
                     {"mean_accuracy", ar.mean_accuracy},
                     {"std_accuracy", ar.std_accuracy},
                     {"mean_wall_time", ar.mean_wall_time},
                     {"runs", runs}});
  }
  return {{"format", "gwosae-result"},
          {"version", 1},
          {"dataset_name", result.dataset_name},
          {"features", result.features},
          {"instances", result.instances},
          {"classes", result.classes},
          {"layer_dims", result.layer_dims},
          {"population_size", result.population_size},
          {"max_iterations", result.max_iterations},
          {"repeats", result.repeats},
          {"base_seed", result.base_seed},
          {"train_fraction", result.train_fraction},
          {"algorithms", algos}};
}

ExperimentResult result_from_json(const json& j) {
  try {
    if (j.at("format") != "gwosae-result") throw ParseError("not a gwosae result file");
    ExperimentResult r;
    r.dataset_name = j.at("dataset_name").get<std::string>();
    r.features = j.at("features").get<std::size_t>();
    r.instances = j.at("instances").get<std::size_t>();
    r.classes = j.at("classes").get<std::size_t>();
    r.layer_dims = j.at("layer_dims").get<std::vector<std::size_t>>();
    r.population_size = j.at("population_size").get<std::size_t>();
    r.max_iterations = j.at("max_iterations").get<std::size_t>();
    r.repeats = j.at("repeats").get<std::size_t>();
    r.base_seed = j.at("base_seed").get<std::uint64_t>();
    r.train_fraction = j.at("train_fraction").get<double>();
    for (const auto& aj : j.at("algorithms")) {
      AlgorithmResult ar;
      ar.algorithm = parse_algorithm(aj.at("algorithm").get<std::string>());
      ar.mean_accuracy = aj.at("mean_accuracy").get<double>();
      ar.std_accuracy = aj.at("std_accuracy").get<double>();
      ar.mean_wall_time = aj.at("mean_wall_time").get<double>();
      for (const auto& rj : aj.at("runs")) {
        RepeatResult rr;
        rr.repeat = rj.at("repeat").get<std::size_t>();
        rr.test_accuracy = rj.at("test_accuracy").get<double>();
        rr.wall_time_seconds = rj.at("wall_time_seconds").get<double>();
        rr.report.ae1_trace = trace_from_json(rj.at("ae1"));
        rr.report.ae2_trace = trace_from_json(rj.at("ae2"));
        rr.report.softmax_trace = trace_from_json(rj.at("softmax"));
        rr.report.total_wall_time = rj.at("total_wall_time").get<double>();
        ar.runs.push_back(std::move(rr));
      }
      r.algorithms.push_back(std::move(ar));
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed result file: ") + e.what());
  }
}

}  // namespace gwosae

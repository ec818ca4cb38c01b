// gwosae command-line front end.
//
//   gwosae train    --dims I,H1,H2,C (--data FILE | --synth NxFxC) [options]
//   gwosae evaluate --model FILE (--data FILE | --synth NxFxC) [--confusion FILE]
//   gwosae compare  --dims ... --algos gwo,pso,ga,abc --repeats 5 --out DIR
//   gwosae synth    --synth NxFxC --separation 6 --seed S --out FILE
//   gwosae curves   --result DIR/result.json --out DIR
//
// Exit status: 0 success, 2 usage or validation error, 1 runtime failure.

#include <omp.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gwosae/data_io.hpp"
#include "gwosae/errors.hpp"
#include "gwosae/experiments.hpp"
#include "gwosae/model_io.hpp"
#include "gwosae/pipeline.hpp"

namespace fs = std::filesystem;
using namespace gwosae;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Validation failures map to exit 2, everything else to exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

std::size_t to_count(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw UsageError(what + ": '" + s + "' is not a non-negative integer");
  }
  if (pos != s.size() || (!s.empty() && s.front() == '-')) {
    throw UsageError(what + ": '" + s + "' is not a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

double to_real(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError(what + ": '" + s + "' is not a number");
  }
  if (pos != s.size()) throw UsageError(what + ": '" + s + "' is not a number");
  return v;
}

Bounds parse_pair(const std::string& text, const std::string& what) {
  const auto parts = split_list(text);
  if (parts.size() != 2) throw UsageError(what + " needs two values lo,hi");
  return {to_real(parts[0], what), to_real(parts[1], what)};
}

// --- Shared option groups ---------------------------------------------------

struct DataOptions {
  std::string data;
  std::string synth;
  double separation = 6.0;
  std::uint64_t data_seed = 1;
  std::string label_column;
  bool no_header = false;
  std::string expect_shape;

  void add(CLI::App& app) {
    app.add_option("--data", data, "Delimited dataset file (features + one label column)");
    app.add_option("--synth", synth, "Generate a synthetic dataset NxFxC instead of --data");
    app.add_option("--separation", separation,
                   "Synthetic class-mean separation in within-class sigmas")
        ->capture_default_str();
    app.add_option("--data-seed", data_seed, "Seed of the synthetic generator")
        ->capture_default_str();
    app.add_option("--label-column", label_column,
                   "Label column: 0-based index or header name (default: last column)");
    app.add_flag("--no-header", no_header, "The file has no header row");
    app.add_option("--expect-shape", expect_shape,
                   "Reject the dataset unless it has exactly F features, N instances, C classes "
                   "(e.g. 2000,62,2 for Colon)");
  }

  void check() const {
    if (data.empty() == synth.empty()) throw UsageError("give exactly one of --data or --synth");
    if (!synth.empty()) synth_shape();
    if (!expect_shape.empty()) {
      try {
        parse_expected_shape(expect_shape);
      } catch (const ArgumentError& e) {
        throw UsageError(e.what());
      }
    }
  }

  std::array<std::size_t, 3> synth_shape() const {
    const auto parts = split_list(synth, 'x');
    if (parts.size() != 3) throw UsageError("--synth expects NxFxC, e.g. 60x200x2");
    return {to_count(parts[0], "--synth N"), to_count(parts[1], "--synth F"),
            to_count(parts[2], "--synth C")};
  }

  Dataset load() const {
    Dataset ds;
    if (!synth.empty()) {
      const auto [n, f, c] = synth_shape();
      try {
        ds = make_synthetic(n, f, c, separation, data_seed);
      } catch (const ArgumentError& e) {
        throw UsageError(e.what());
      }
    } else {
      LabelColumn column = LabelColumn::last();
      if (!label_column.empty()) {
        const bool numeric = label_column.find_first_not_of("0123456789") == std::string::npos;
        column = numeric ? LabelColumn::index(to_count(label_column, "--label-column"))
                         : LabelColumn::named(label_column);
      }
      ds = load_csv(data, column, !no_header);
    }
    if (!expect_shape.empty()) {
      if (auto bad = shape_mismatch(ds, parse_expected_shape(expect_shape))) {
        throw UsageError("dataset '" + ds.name + "' rejected by --expect-shape: " + *bad);
      }
    }
    return ds;
  }
};

struct SpecOptions {
  std::string dims;
  std::size_t population = 30;
  std::size_t iterations = 500;
  double rho = 0.05;
  std::string lambda_bounds = "0,1";
  std::string beta_bounds = "0,10";
  std::string box = "-20,20";
  std::string softmax_trainer = "metaheuristic";
  double softmax_lr = 0.5;
  std::vector<std::string> opt_params;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  int threads = 0;
  bool serial = false;

  void add(CLI::App& app) {
    app.add_option("--dims", dims, "Layer sizes input,hidden1,hidden2,classes (e.g. 200,50,20,2)");
    app.add_option("--population", population, "Individuals per optimizer")->capture_default_str();
    app.add_option("--iterations", iterations, "Optimizer iterations per stage")
        ->capture_default_str();
    app.add_option("--rho", rho, "Target mean hidden activation")->capture_default_str();
    app.add_option("--lambda-bounds", lambda_bounds, "Search range lo,hi of the L2 coefficient")
        ->capture_default_str();
    app.add_option("--beta-bounds", beta_bounds, "Search range lo,hi of the sparsity coefficient")
        ->capture_default_str();
    app.add_option("--box", box, "Search box lo,hi for every parameter")->capture_default_str();
    app.add_option("--softmax-trainer", softmax_trainer, "metaheuristic or gradient")
        ->capture_default_str();
    app.add_option("--softmax-lr", softmax_lr, "Learning rate of the gradient softmax trainer")
        ->capture_default_str();
    app.add_option("--opt", opt_params,
                   "Algorithm parameter key=value, repeatable (e.g. pso.inertia=0.6, "
                   "gwo.a_end=1)");
    app.add_option("--train-fraction", train_fraction, "Stratified training share")
        ->capture_default_str();
    app.add_option("--seed", seed, "Master seed")->capture_default_str();
    app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")
        ->capture_default_str();
    app.add_flag("--serial", serial, "Evaluate populations serially");
  }

  PipelineSpec build(Algorithm algorithm) const {
    if (dims.empty()) throw UsageError("--dims is required");
    const auto parts = split_list(dims);
    if (parts.size() != 4) {
      throw UsageError("--dims needs exactly 4 elements input,hidden1,hidden2,classes; got " +
                       std::to_string(parts.size()));
    }
    PipelineSpec spec;
    for (const auto& p : parts) spec.layer_dims.push_back(to_count(p, "--dims"));
    for (auto& layer : spec.layers) {
      layer.rho = rho;
      layer.lambda_bounds = parse_pair(lambda_bounds, "--lambda-bounds");
      layer.beta_bounds = parse_pair(beta_bounds, "--beta-bounds");
    }
    const Bounds b = parse_pair(box, "--box");
    spec.search_lo = b.lo;
    spec.search_hi = b.hi;
    spec.optimizer.population_size = population;
    spec.optimizer.max_iterations = iterations;
    spec.optimizer.algorithm = algorithm;
    spec.optimizer.execution = serial ? Execution::serial : Execution::parallel;
    for (const auto& kv : opt_params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--opt expects key=value, got '" + kv + "'");
      spec.optimizer.params[kv.substr(0, eq)] = to_real(kv.substr(eq + 1), "--opt " + kv);
    }
    spec.softmax_learning_rate = softmax_lr;
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
      throw UsageError("--train-fraction must lie strictly between 0 and 1");
    }
    try {
      spec.softmax_trainer = parse_softmax_trainer(softmax_trainer);
      spec.validate();
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    if (threads < 0) throw UsageError("--threads must be >= 0");
    if (threads > 0) omp_set_num_threads(threads);
    return spec;
  }
};

void write_confusion(const Matrix& m, const std::vector<std::string>& labels,
                     const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "true\\predicted";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << labels[i];
    for (std::size_t j = 0; j < m.cols(); ++j) out << ',' << static_cast<long long>(m(i, j));
    out << '\n';
  }
}

// Maps dataset labels onto the model's label order by name.
Labels relabel(const Dataset& ds, const std::vector<std::string>& model_labels) {
  std::vector<std::size_t> to_model(ds.label_map.size());
  for (std::size_t i = 0; i < ds.label_map.size(); ++i) {
    const auto it = std::find(model_labels.begin(), model_labels.end(), ds.label_map[i]);
    if (it == model_labels.end()) {
      throw UsageError("dataset label '" + ds.label_map[i] + "' is unknown to the model");
    }
    to_model[i] = static_cast<std::size_t>(it - model_labels.begin());
  }
  Labels y(ds.labels.size());
  for (std::size_t s = 0; s < y.size(); ++s) y[s] = to_model[ds.labels[s]];
  return y;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// --- Config file ------------------------------------------------------------

// Finds "--config FILE" / "--config=FILE" and turns the JSON object it names
// into extra "--key=value" arguments for every key not already on the
// command line, so explicit flags win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;

  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");

  auto on_command_line = [&rest](const std::string& flag) {
    return std::any_of(rest.begin(), rest.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (on_command_line(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) rest.push_back(flag);
    } else if (value.is_string()) {
      rest.push_back(flag + "=" + value.get<std::string>());
    } else if (value.is_number()) {
      rest.push_back(flag + "=" + value.dump());
    } else if (value.is_array()) {
      for (const auto& item : value) {
        rest.push_back(flag + "=" + (item.is_string() ? item.get<std::string>() : item.dump()));
      }
    } else {
      throw UsageError("config key '" + key + "' has an unsupported value type");
    }
  }
  return rest;
}

// --- Subcommands ------------------------------------------------------------

int cmd_train(const DataOptions& data, const SpecOptions& opts, const std::string& algo,
              const std::string& model_path, const std::string& out_dir) {
  Algorithm algorithm;
  try {
    algorithm = parse_algorithm(algo);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const PipelineSpec spec = opts.build(algorithm);
  data.check();
  const Dataset ds = data.load();
  if (ds.feature_count() != spec.input_dim() || ds.class_count() != spec.class_count()) {
    throw UsageError("dataset has " + std::to_string(ds.feature_count()) + " features and " +
                     std::to_string(ds.class_count()) + " classes; --dims expects " +
                     std::to_string(spec.input_dim()) + " and " +
                     std::to_string(spec.class_count()));
  }
  const SplitDataset parts = split(ds, opts.train_fraction, repeat_seed(opts.seed, 0));
  const TrainingOutcome outcome =
      train(spec, parts.train.features, parts.train.labels, ds.label_map, opts.seed);
  print_warnings(outcome.report.warnings);

  const Prediction pred = predict(outcome.model, parts.test.features);
  const double acc = accuracy(parts.test.labels, pred.labels);

  fs::create_directories(out_dir);
  const fs::path model_file = model_path.empty() ? fs::path(out_dir) / "model.json" : fs::path(model_path);
  if (model_file.has_parent_path()) fs::create_directories(model_file.parent_path());
  save_model(outcome.model, model_file);
  emit_training_curves(outcome.report, fs::path(out_dir) / "curves", "train");

  std::cout << "test_accuracy_pct " << format_percent(acc) << '\n'
            << "train_rows " << parts.train.size() << " test_rows " << parts.test.size() << '\n'
            << "model " << model_file.string() << '\n';
  return kExitOk;
}

int cmd_evaluate(const DataOptions& data, const std::string& model_path,
                 const std::string& confusion_path) {
  data.check();
  const TrainedPipeline model = load_model(model_path);
  const Dataset ds = data.load();
  if (ds.feature_count() != model.spec.input_dim()) {
    throw UsageError("model expects " + std::to_string(model.spec.input_dim()) +
                     " features but dataset '" + ds.name + "' has " +
                     std::to_string(ds.feature_count()));
  }
  const Labels y = relabel(ds, model.label_map);
  const Prediction pred = predict(model, ds.features);
  const double acc = accuracy(y, pred.labels);
  const Matrix cm = confusion_matrix(y, pred.labels, model.label_map.size());
  const fs::path cm_path(confusion_path);
  if (cm_path.has_parent_path()) fs::create_directories(cm_path.parent_path());
  write_confusion(cm, model.label_map, cm_path);
  std::cout << "accuracy_pct " << format_percent(acc) << '\n'
            << "samples " << ds.size() << '\n'
            << "confusion " << cm_path.string() << '\n';
  return kExitOk;
}

int cmd_compare(const DataOptions& data, const SpecOptions& opts, const std::string& algos,
                std::size_t repeats, const std::string& out_dir) {
  ExperimentPlan plan;
  plan.algorithms.clear();
  for (const auto& token : split_list(algos)) {
    try {
      plan.algorithms.push_back(parse_algorithm(token));
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  if (plan.algorithms.empty()) {
    throw UsageError("--algos needs at least one of " + std::string(kAlgorithmTokens));
  }
  if (repeats < 1) throw UsageError("--repeats must be at least 1");
  plan.pipeline = opts.build(plan.algorithms.front());
  data.check();
  plan.dataset = data.load();
  plan.repeats = repeats;
  plan.base_seed = opts.seed;
  plan.train_fraction = opts.train_fraction;
  try {
    plan.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  print_warnings(plan.pipeline.warnings());

  const ExperimentResult result = run_experiment(plan);
  const fs::path out(out_dir);
  fs::create_directories(out);
  emit_report(result, out / "report.json");
  emit_curves(result, out / "curves");
  {
    std::ofstream rf(out / "result.json", std::ios::binary);
    if (!rf) throw IoError("cannot write '" + (out / "result.json").string() + "'");
    rf << result_to_json(result).dump(1) << '\n';
  }
  std::cout << report_table(result);
  return kExitOk;
}

int cmd_synth(const DataOptions& data, const std::string& out_path) {
  if (data.synth.empty()) throw UsageError("synth needs --synth NxFxC");
  const Dataset ds = data.load();
  const fs::path out(out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_csv(ds, out);
  std::cout << "wrote " << ds.size() << " x " << ds.feature_count() << " (" << ds.class_count()
            << " classes) to " << out.string() << '\n';
  return kExitOk;
}

int cmd_curves(const std::string& result_path, const std::string& out_dir) {
  std::ifstream in(result_path, std::ios::binary);
  if (!in) throw IoError("cannot open result file '" + result_path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed result file: ") + e.what());
  }
  const ExperimentResult result = result_from_json(j);
  const auto files = emit_curves(result, out_dir);
  std::cout << "wrote " << files.size() << " curve files to " << out_dir << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grey wolf optimizer training of stacked sparse autoencoders"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand help of every subcommand");

  DataOptions train_data, eval_data, compare_data, synth_data;
  SpecOptions train_opts, compare_opts;
  std::string algo = "gwo", model_path, out_dir = "gwosae_out";
  std::string eval_model, confusion_path = "confusion.csv";
  std::string algos = "gwo,pso,ga,abc", compare_out = "gwosae_compare";
  std::size_t repeats = 5;
  std::string synth_out = "synthetic.csv";
  std::string result_path, curves_out = "curves";

  const std::string config_help = "JSON object of flag values; explicit flags take precedence";
  std::string unused_config;

  auto* train = app.add_subcommand("train", "Train one pipeline and report test accuracy");
  train_data.add(*train);
  train_opts.add(*train);
  train->add_option("--algo", algo, "Optimizer: gwo, pso, ga or abc")->capture_default_str();
  train->add_option("--model", model_path, "Model file to write (default OUT/model.json)");
  train->add_option("--out", out_dir, "Directory for the model and per-stage curves")
      ->capture_default_str();
  train->add_option("--config", unused_config, config_help);

  auto* evaluate = app.add_subcommand("evaluate", "Score a saved model on a dataset");
  eval_data.add(*evaluate);
  evaluate->add_option("--model", eval_model, "Model file written by train")->required();
  evaluate->add_option("--confusion", confusion_path, "Confusion matrix CSV to write")
      ->capture_default_str();
  evaluate->add_option("--config", unused_config, config_help);

  auto* compare = app.add_subcommand("compare", "Repeated runs of several optimizers");
  compare_data.add(*compare);
  compare_opts.add(*compare);
  compare->add_option("--algos", algos, "Comma-separated subset of gwo,pso,ga,abc")
      ->capture_default_str();
  compare->add_option("--repeats", repeats, "Repeats per algorithm")->capture_default_str();
  compare->add_option("--out", compare_out, "Directory for report, result and curves")
      ->capture_default_str();
  compare->add_option("--config", unused_config, config_help);

  auto* synth = app.add_subcommand("synth", "Write a synthetic Gaussian-blob dataset as CSV");
  synth_data.add(*synth);
  synth->add_option("--out", synth_out, "CSV file to write")->capture_default_str();
  synth->add_option("--config", unused_config, config_help);

  auto* curves = app.add_subcommand("curves", "Re-emit curve CSVs from a saved result.json");
  curves->add_option("--result", result_path, "result.json written by compare")->required();
  curves->add_option("--out", curves_out, "Directory for the curve CSVs")->capture_default_str();
  curves->add_option("--config", unused_config, config_help);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*train) return cmd_train(train_data, train_opts, algo, model_path, out_dir);
    if (*evaluate) return cmd_evaluate(eval_data, eval_model, confusion_path);
    if (*compare) return cmd_compare(compare_data, compare_opts, algos, repeats, compare_out);
    if (*synth) return cmd_synth(synth_data, synth_out);
    if (*curves) return cmd_curves(result_path, curves_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

#include "gwosae/model_io.hpp"

#include <fstream>
#include <sstream>

#include "gwosae/errors.hpp"

namespace gwosae {

using nlohmann::json;

namespace {

json bounds_to_json(const Bounds& b) { return json::array({b.lo, b.hi}); }

Bounds bounds_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("bounds must be a [lo, hi] pair");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json ae_to_json(const AutoencoderParams& p) {
  return {{"input_dim", p.input_dim()},     {"hidden_dim", p.hidden_dim()},
          {"w_enc", p.w_enc.storage()},     {"b_enc", p.b_enc},
          {"w_dec", p.w_dec.storage()},     {"b_dec", p.b_dec},
          {"lambda", p.lambda},             {"beta", p.beta}};
}

AutoencoderParams ae_from_json(const json& j, const AutoencoderSpec& spec) {
  AutoencoderParams p;
  const auto k = j.at("input_dim").get<std::size_t>();
  const auto h = j.at("hidden_dim").get<std::size_t>();
  if (k != spec.input_dim || h != spec.hidden_dim) {
    throw ParseError("encoder shape " + std::to_string(k) + "-" + std::to_string(h) +
                     " disagrees with the stored layer dims");
  }
  p.w_enc = Matrix(h, k, j.at("w_enc").get<std::vector<double>>());
  p.b_enc = j.at("b_enc").get<std::vector<double>>();
  p.w_dec = Matrix(k, h, j.at("w_dec").get<std::vector<double>>());
  p.b_dec = j.at("b_dec").get<std::vector<double>>();
  p.lambda = j.at("lambda").get<double>();
  p.beta = j.at("beta").get<double>();
  if (p.b_enc.size() != h || p.b_dec.size() != k) throw ParseError("encoder bias length mismatch");
  return p;
}

}  // namespace

json optimizer_to_json(const OptimizerConfig& cfg) {
  return {{"algorithm", std::string(to_string(cfg.algorithm))},
          {"population_size", cfg.population_size},
          {"max_iterations", cfg.max_iterations},
          {"seed", cfg.seed},
          {"params", cfg.params}};
}

OptimizerConfig optimizer_from_json(const json& j) {
  OptimizerConfig cfg;
  cfg.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  cfg.population_size = j.at("population_size").get<std::size_t>();
  cfg.max_iterations = j.at("max_iterations").get<std::size_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.params = j.at("params").get<std::map<std::string, double>>();
  return cfg;
}

json spec_to_json(const PipelineSpec& spec) {
  json layers = json::array();
  for (const auto& l : spec.layers) {
    layers.push_back({{"rho", l.rho},
                      {"lambda_bounds", bounds_to_json(l.lambda_bounds)},
                      {"beta_bounds", bounds_to_json(l.beta_bounds)}});
  }
  return {{"layer_dims", spec.layer_dims},
          {"layers", layers},
          {"optimizer", optimizer_to_json(spec.optimizer)},
          {"search_box", json::array({spec.search_lo, spec.search_hi})},
          {"softmax_trainer", std::string(to_string(spec.softmax_trainer))},
          {"softmax_learning_rate", spec.softmax_learning_rate}};
}

PipelineSpec spec_from_json(const json& j) {
  PipelineSpec spec;
  spec.layer_dims = j.at("layer_dims").get<std::vector<std::size_t>>();
  const auto& layers = j.at("layers");
  if (!layers.is_array() || layers.size() != 2) throw ParseError("expected two layer settings");
  for (std::size_t l = 0; l < 2; ++l) {
    spec.layers[l].rho = layers[l].at("rho").get<double>();
    spec.layers[l].lambda_bounds = bounds_from_json(layers[l].at("lambda_bounds"));
    spec.layers[l].beta_bounds = bounds_from_json(layers[l].at("beta_bounds"));
  }
  spec.optimizer = optimizer_from_json(j.at("optimizer"));
  const auto box = bounds_from_json(j.at("search_box"));
  spec.search_lo = box.lo;
  spec.search_hi = box.hi;
  spec.softmax_trainer = parse_softmax_trainer(j.at("softmax_trainer").get<std::string>());
  spec.softmax_learning_rate = j.at("softmax_learning_rate").get<double>();
  return spec;
}

json trace_to_json(const RunTrace& trace, bool with_position) {
  json j = {{"best_fitness_per_iteration", trace.best_fitness_per_iteration},
            {"evaluations", trace.evaluations},
            {"wall_time_seconds", trace.wall_time_seconds}};
  if (with_position) j["best_position"] = trace.best_position;
  return j;
}

RunTrace trace_from_json(const json& j) {
  RunTrace t;
  t.best_fitness_per_iteration = j.at("best_fitness_per_iteration").get<std::vector<double>>();
  t.evaluations = j.at("evaluations").get<std::size_t>();
  t.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  if (j.contains("best_position")) t.best_position = j["best_position"].get<std::vector<double>>();
  return t;
}

std::string serialize_model(const TrainedPipeline& model) {
  const json j = {
      {"format", "gwosae-model"},
      {"version", kModelFormatVersion},
      {"spec", spec_to_json(model.spec)},
      {"encoder1", ae_to_json(model.encoder1)},
      {"encoder2", ae_to_json(model.encoder2)},
      {"softmax",
       {{"classes", model.softmax_w.rows()},
        {"hidden", model.softmax_w.cols()},
        {"w", model.softmax_w.storage()},
        {"b", model.softmax_b}}},
      {"normalization", {{"min", model.feature_min}, {"max", model.feature_max}}},
      {"labels", model.label_map},
  };
  return j.dump(1) + "\n";
}

TrainedPipeline deserialize_model(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "gwosae-model") throw ParseError("not a gwosae model file");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ParseError("unsupported model version " + std::to_string(version));
    }
    TrainedPipeline m;
    m.spec = spec_from_json(j.at("spec"));
    m.spec.validate();
    m.encoder1 = ae_from_json(j.at("encoder1"), m.spec.autoencoder_spec(0));
    m.encoder2 = ae_from_json(j.at("encoder2"), m.spec.autoencoder_spec(1));
    const auto& sm = j.at("softmax");
    const auto k = sm.at("classes").get<std::size_t>();
    const auto d = sm.at("hidden").get<std::size_t>();
    if (k != m.spec.class_count() || d != m.spec.layer_dims[2]) {
      throw ParseError("softmax shape disagrees with the stored layer dims");
    }
    m.softmax_w = Matrix(k, d, sm.at("w").get<std::vector<double>>());
    m.softmax_b = sm.at("b").get<std::vector<double>>();
    m.feature_min = j.at("normalization").at("min").get<std::vector<double>>();
    m.feature_max = j.at("normalization").at("max").get<std::vector<double>>();
    m.label_map = j.at("labels").get<std::vector<std::string>>();
    if (m.softmax_b.size() != k || m.label_map.size() != k ||
        m.feature_min.size() != m.spec.input_dim() ||
        m.feature_max.size() != m.spec.input_dim()) {
      throw ParseError("model arrays have inconsistent lengths");
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  } catch (const ShapeError& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const TrainedPipeline& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model to '" + path.string() + "'");
  out << serialize_model(model);
  if (!out) throw IoError("failed writing model to '" + path.string() + "'");
}

TrainedPipeline load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace gwosae

#pragma once

// Model files are UTF-8 JSON:
//
//   { "format": "gwosae-model", "version": 1,
//     "spec": { layer_dims, layers[2], optimizer, search box, softmax trainer },
//     "encoder1"/"encoder2": { input_dim, hidden_dim, w_enc, b_enc, w_dec, b_dec, lambda, beta },
//     "softmax": { classes, hidden, w, b },
//     "normalization": { min, max },
//     "labels": [ ... ] }
//
// Matrices are flat row-major arrays. Doubles are written in shortest
// round-trip form, so save followed by load reproduces every bit.

#include <filesystem>
#include <string>

#include "json.hpp"

#include "gwosae/pipeline.hpp"

namespace gwosae {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json optimizer_to_json(const OptimizerConfig& cfg);
OptimizerConfig optimizer_from_json(const nlohmann::json& j);

nlohmann::json spec_to_json(const PipelineSpec& spec);
PipelineSpec spec_from_json(const nlohmann::json& j);

nlohmann::json trace_to_json(const RunTrace& trace, bool with_position);
RunTrace trace_from_json(const nlohmann::json& j);

std::string serialize_model(const TrainedPipeline& model);
/// Throws ParseError on malformed or inconsistent content.
TrainedPipeline deserialize_model(const std::string& text);

void save_model(const TrainedPipeline& model, const std::filesystem::path& path);
TrainedPipeline load_model(const std::filesystem::path& path);

}  // namespace gwosae

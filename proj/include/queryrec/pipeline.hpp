#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "queryrec/config.hpp"
#include "queryrec/ngram.hpp"

namespace queryrec {

/// Artifact file names inside the work directory. Every command reads its
/// inputs from here and writes its outputs atomically (temp + rename).
namespace artifacts {
inline constexpr const char* kCatalog = "catalog.jsonl";
inline constexpr const char* kSequences = "sequences.jsonl";
inline constexpr const char* kIndex = "index.json";
inline constexpr const char* kPrepareManifest = "prepare_manifest.json";
inline constexpr const char* kModel = "model.json";
inline constexpr const char* kParams = "params.json";
inline constexpr const char* kGridReport = "grid_report.tsv";
inline constexpr const char* kRecommendations = "recommendations.jsonl";
std::string metrics_file(int m);
} // namespace artifacts

/// Ingests interactions + catalog, splits users, snapshots the catalog, the
/// sequences, and the search index, and writes a manifest of counts, the
/// seed, and the preprocessing rule choices.
nlohmann::json cmd_prepare(const PipelineConfig& config);

/// Builds training lines from the train split and fits the n-gram model.
nlohmann::json cmd_train(const PipelineConfig& config);

/// Generates validation queries with the trained generator, grid-searches
/// (k1, b) by Recall@tuning_k through retrieval + merge, writes the chosen
/// params and the full grid report.
nlohmann::json cmd_tune(const PipelineConfig& config);

/// Recommendation records for one user (returned) or every user (written to
/// recommendations.jsonl; a summary is returned).
nlohmann::json cmd_recommend(const PipelineConfig& config,
                             const std::optional<std::string>& user_id);

/// Evaluates the test split at every requested m, one metrics report each.
nlohmann::json cmd_eval(const PipelineConfig& config, const std::vector<int>& m_values);

/// Opens the configured query source. For the builtin mode the model
/// snapshot is loaded from the work directory; the model object must
/// outlive the generator, so both travel together.
struct LoadedGenerator {
    std::unique_ptr<NGramModel> model;
    std::unique_ptr<QueryGenerator> generator;
};
LoadedGenerator open_generator(const PipelineConfig& config);

} // namespace queryrec

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "queryrec/generator.hpp"
#include "queryrec/tune.hpp"

namespace queryrec {

/// Everything a pipeline run needs, loadable from a single JSON file.
/// Unknown keys are rejected; every numeric field is range-checked.
struct PipelineConfig {
    std::filesystem::path interactions;
    std::filesystem::path catalog;
    std::filesystem::path work_dir = "work";

    std::uint64_t seed = 42;

    int ngram_order = 3;
    double alpha = 0.1;
    double gamma = 0.7;

    GeneratorConfig generator;

    std::vector<std::size_t> ks = {5, 10, 20, 40};
    std::size_t tuning_k = 20;
    GridSpec grid;

    unsigned workers = 1;
    bool exclude_history = false;

    static PipelineConfig from_file(const std::filesystem::path& path);
    static PipelineConfig from_json(const nlohmann::json& payload);
    nlohmann::json to_json() const;

    void validate() const; // throws UsageError

    /// "builtin" or "external:<command>", the same syntax the CLI flag uses.
    void set_generator_spec(const std::string& spec);
    std::string generator_spec() const;
};

} // namespace queryrec

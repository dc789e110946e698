#include "queryrec/config.hpp"

#include <set>

#include "queryrec/errors.hpp"
#include "queryrec/jsonl.hpp"

namespace queryrec {

namespace {

void reject_unknown_keys(const nlohmann::json& object, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, _] : object.items()) {
        if (known.find(key) == known.end()) {
            throw UsageError("unknown config key \"" + key + "\" in " + where);
        }
    }
}

template <typename T>
T get_or(const nlohmann::json& object, const char* key, T fallback) {
    if (!object.contains(key)) {
        return fallback;
    }
    try {
        return object.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw UsageError(std::string("config key \"") + key + "\" has the wrong type");
    }
}

} // namespace

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
    nlohmann::json payload = nlohmann::json::parse(read_file(path), nullptr, false);
    if (payload.is_discarded()) {
        throw UsageError("config file is not valid JSON: " + path.string());
    }
    return from_json(payload);
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& payload) {
    if (!payload.is_object()) {
        throw UsageError("config must be a JSON object");
    }
    reject_unknown_keys(payload,
                        {"interactions", "catalog", "work_dir", "seed", "ngram_order", "alpha",
                         "gamma", "history_bias", "max_query_tokens", "m", "ks", "tuning_k",
                         "grid", "generator", "workers", "exclude_history"},
                        "config");

    PipelineConfig config;
    config.interactions = get_or<std::string>(payload, "interactions", "");
    config.catalog = get_or<std::string>(payload, "catalog", "");
    config.work_dir = get_or<std::string>(payload, "work_dir", "work");
    config.seed = get_or<std::uint64_t>(payload, "seed", config.seed);
    config.ngram_order = get_or<int>(payload, "ngram_order", config.ngram_order);
    config.alpha = get_or<double>(payload, "alpha", config.alpha);
    config.gamma = get_or<double>(payload, "gamma", config.gamma);
    config.generator.history_bias =
        get_or<double>(payload, "history_bias", config.generator.history_bias);
    config.generator.max_query_tokens =
        get_or<int>(payload, "max_query_tokens", config.generator.max_query_tokens);
    config.generator.beam_size = get_or<int>(payload, "m", config.generator.beam_size);
    config.ks = get_or<std::vector<std::size_t>>(payload, "ks", config.ks);
    config.tuning_k = get_or<std::size_t>(payload, "tuning_k", config.tuning_k);
    if (payload.contains("grid")) {
        const auto& grid = payload.at("grid");
        if (!grid.is_object()) {
            throw UsageError("config key \"grid\" must be an object");
        }
        reject_unknown_keys(grid, {"k1_min", "k1_max", "k1_step", "b_min", "b_max", "b_step"},
                            "grid");
        config.grid.k1_min = get_or<double>(grid, "k1_min", config.grid.k1_min);
        config.grid.k1_max = get_or<double>(grid, "k1_max", config.grid.k1_max);
        config.grid.k1_step = get_or<double>(grid, "k1_step", config.grid.k1_step);
        config.grid.b_min = get_or<double>(grid, "b_min", config.grid.b_min);
        config.grid.b_max = get_or<double>(grid, "b_max", config.grid.b_max);
        config.grid.b_step = get_or<double>(grid, "b_step", config.grid.b_step);
    }
    if (payload.contains("generator")) {
        config.set_generator_spec(get_or<std::string>(payload, "generator", "builtin"));
    }
    config.workers = get_or<unsigned>(payload, "workers", config.workers);
    config.exclude_history = get_or<bool>(payload, "exclude_history", config.exclude_history);
    config.validate();
    return config;
}

nlohmann::json PipelineConfig::to_json() const {
    nlohmann::json payload;
    payload["interactions"] = interactions.string();
    payload["catalog"] = catalog.string();
    payload["work_dir"] = work_dir.string();
    payload["seed"] = seed;
    payload["ngram_order"] = ngram_order;
    payload["alpha"] = alpha;
    payload["gamma"] = gamma;
    payload["history_bias"] = generator.history_bias;
    payload["max_query_tokens"] = generator.max_query_tokens;
    payload["m"] = generator.beam_size;
    payload["ks"] = ks;
    payload["tuning_k"] = tuning_k;
    payload["grid"] = {{"k1_min", grid.k1_min}, {"k1_max", grid.k1_max},
                       {"k1_step", grid.k1_step}, {"b_min", grid.b_min},
                       {"b_max", grid.b_max},   {"b_step", grid.b_step}};
    payload["generator"] = generator_spec();
    payload["workers"] = workers;
    payload["exclude_history"] = exclude_history;
    return payload;
}

void PipelineConfig::validate() const {
    if (ngram_order < 2) {
        throw UsageError("ngram_order must be at least 2");
    }
    if (!(alpha > 0.0)) {
        throw UsageError("alpha must be positive");
    }
    if (gamma < 0.0) {
        throw UsageError("gamma must be non-negative");
    }
    generator.validate();
    if (ks.empty()) {
        throw UsageError("ks must name at least one K");
    }
    for (std::size_t k : ks) {
        if (k < 1) {
            throw UsageError("every K must be at least 1");
        }
    }
    if (tuning_k < 1) {
        throw UsageError("tuning_k must be at least 1");
    }
    grid.validate();
}

void PipelineConfig::set_generator_spec(const std::string& spec) {
    if (spec == "builtin") {
        generator.mode = GeneratorConfig::Mode::builtin;
        generator.external_command.clear();
        return;
    }
    const std::string prefix = "external:";
    if (spec.rfind(prefix, 0) == 0 && spec.size() > prefix.size()) {
        generator.mode = GeneratorConfig::Mode::external;
        generator.external_command = spec.substr(prefix.size());
        return;
    }
    throw UsageError("generator must be \"builtin\" or \"external:<command>\", got \"" + spec + "\"");
}

std::string PipelineConfig::generator_spec() const {
    if (generator.mode == GeneratorConfig::Mode::builtin) {
        return "builtin";
    }
    return "external:" + generator.external_command;
}

} // namespace queryrec

#include "queryrec/pipeline.hpp"

#include <algorithm>

#include "queryrec/corpus.hpp"
#include "queryrec/errors.hpp"
#include "queryrec/external_generator.hpp"
#include "queryrec/jsonl.hpp"
#include "queryrec/metrics.hpp"
#include "queryrec/parallel.hpp"
#include "queryrec/recommend.hpp"
#include "queryrec/tune.hpp"

namespace queryrec {

namespace artifacts {
std::string metrics_file(int m) {
    return "metrics_m" + std::to_string(m) + ".json";
}
} // namespace artifacts

namespace {

std::filesystem::path artifact(const PipelineConfig& config, const char* name) {
    return config.work_dir / name;
}

void require_artifact(const std::filesystem::path& path, const std::string& produced_by) {
    if (!std::filesystem::exists(path)) {
        throw DataError("missing artifact " + path.string() + "; run `" + produced_by + "` first");
    }
}

Catalog load_catalog_artifact(const PipelineConfig& config) {
    const auto path = artifact(config, artifacts::kCatalog);
    require_artifact(path, "prepare");
    return catalog_from_jsonl_file(path);
}

std::vector<UserSequence> load_sequences_artifact(const PipelineConfig& config) {
    const auto path = artifact(config, artifacts::kSequences);
    require_artifact(path, "prepare");
    return sequences_from_jsonl_file(path);
}

InvertedIndex load_index_artifact(const PipelineConfig& config) {
    const auto path = artifact(config, artifacts::kIndex);
    require_artifact(path, "prepare");
    nlohmann::json payload = nlohmann::json::parse(read_file(path), nullptr, false);
    if (payload.is_discarded()) {
        throw DataError("index snapshot is not valid JSON: " + path.string());
    }
    return InvertedIndex::from_json(payload);
}

Bm25Params load_params_artifact(const PipelineConfig& config) {
    const auto path = artifact(config, artifacts::kParams);
    require_artifact(path, "tune");
    nlohmann::json payload = nlohmann::json::parse(read_file(path), nullptr, false);
    if (payload.is_discarded()) {
        throw DataError("params file is not valid JSON: " + path.string());
    }
    Bm25Params params{payload.at("k1").get<double>(), payload.at("b").get<double>()};
    params.validate();
    return params;
}

std::vector<UserSequence> split_of(const std::vector<UserSequence>& sequences, Split split) {
    std::vector<UserSequence> subset;
    for (const auto& sequence : sequences) {
        if (sequence.split == split) {
            subset.push_back(sequence);
        }
    }
    return subset;
}

nlohmann::json recommendation_to_json(const RecommendationList& recommendation) {
    nlohmann::json record;
    record["user_id"] = recommendation.user_id;
    nlohmann::json queries = nlohmann::json::array();
    for (const auto& query : recommendation.queries) {
        queries.push_back({{"text", query.text}, {"score", query.score}});
    }
    record["queries"] = std::move(queries);
    nlohmann::json items = nlohmann::json::array();
    for (const auto& item : recommendation.items) {
        items.push_back({{"item_id", item.item_id},
                         {"source_query", item.source_query},
                         {"source_rank", item.source_rank}});
    }
    record["items"] = std::move(items);
    record["query_deficit"] = recommendation.query_deficit;
    return record;
}

std::size_t max_k(const PipelineConfig& config) {
    return *std::max_element(config.ks.begin(), config.ks.end());
}

} // namespace

LoadedGenerator open_generator(const PipelineConfig& config) {
    LoadedGenerator loaded;
    if (config.generator.mode == GeneratorConfig::Mode::external) {
        loaded.generator = std::make_unique<ExternalGenerator>(config.generator.external_command);
        return loaded;
    }
    const auto path = artifact(config, artifacts::kModel);
    require_artifact(path, "train");
    nlohmann::json payload = nlohmann::json::parse(read_file(path), nullptr, false);
    if (payload.is_discarded()) {
        throw DataError("model file is not valid JSON: " + path.string());
    }
    loaded.model = std::make_unique<NGramModel>(NGramModel::from_json(payload.at("model")));
    loaded.generator = std::make_unique<BuiltinGenerator>(
        *loaded.model, config.generator.history_bias, config.gamma);
    return loaded;
}

nlohmann::json cmd_prepare(const PipelineConfig& config) {
    if (config.interactions.empty() || config.catalog.empty()) {
        throw UsageError("prepare needs both --interactions and --catalog paths");
    }
    auto catalog_load = load_catalog(config.catalog);
    auto interaction_load = load_interactions(config.interactions);
    auto build = build_sequences(interaction_load.events, catalog_load.items);
    split_users(build.sequences, config.seed);

    std::filesystem::create_directories(config.work_dir);
    atomic_write(artifact(config, artifacts::kCatalog), catalog_to_jsonl(catalog_load.items));
    atomic_write(artifact(config, artifacts::kSequences), sequences_to_jsonl(build.sequences));
    atomic_write(artifact(config, artifacts::kIndex),
                 InvertedIndex::build(catalog_load.items).to_json().dump() + "\n");

    std::size_t train_count = 0;
    std::size_t validation_count = 0;
    std::size_t test_count = 0;
    for (const auto& sequence : build.sequences) {
        switch (sequence.split) {
            case Split::train: ++train_count; break;
            case Split::validation: ++validation_count; break;
            case Split::test: ++test_count; break;
        }
    }

    nlohmann::json manifest;
    manifest["format_version"] = 1;
    manifest["seed"] = config.seed;
    manifest["catalog_items"] = catalog_load.items.size();
    manifest["catalog_dropped"] = catalog_load.dropped;
    manifest["events"] = interaction_load.events.size();
    manifest["events_malformed"] = interaction_load.dropped;
    manifest["events_unknown_item"] = build.dropped_events;
    manifest["users_dropped_short"] = build.dropped_users;
    manifest["sequences"] = build.sequences.size();
    manifest["splits"] = {{"train", train_count},
                          {"validation", validation_count},
                          {"test", test_count}};
    // The paper leaves both rules open; the run records the choices made.
    manifest["rules"] = {{"dedup", "keep-first-occurrence"},
                         {"truncation", "keep-most-recent-15"},
                         {"timestamp_ties", "item_id-ascending"}};
    atomic_write(artifact(config, artifacts::kPrepareManifest), manifest.dump(2) + "\n");
    return manifest;
}

nlohmann::json cmd_train(const PipelineConfig& config) {
    const auto catalog = load_catalog_artifact(config);
    const auto sequences = load_sequences_artifact(config);
    const auto train_split = split_of(sequences, Split::train);
    if (train_split.empty()) {
        throw DataError("train split is empty; nothing to fit");
    }

    std::vector<std::string> lines;
    lines.reserve(train_split.size());
    for (const auto& sequence : train_split) {
        lines.push_back(make_training_line(sequence, catalog));
    }
    const NGramModel model = NGramModel::fit(lines, config.ngram_order, config.alpha);

    nlohmann::json payload;
    payload["format_version"] = 1;
    payload["model"] = model.to_json();
    payload["metadata"] = {{"seed", config.seed},
                           {"order", config.ngram_order},
                           {"alpha", config.alpha},
                           {"history_bias", config.generator.history_bias},
                           {"gamma", config.gamma},
                           {"max_query_tokens", config.generator.max_query_tokens},
                           {"training_lines", lines.size()}};
    atomic_write(artifact(config, artifacts::kModel), payload.dump() + "\n");

    nlohmann::json summary;
    summary["training_lines"] = lines.size();
    summary["vocabulary"] = model.vocab().size();
    summary["model_file"] = artifact(config, artifacts::kModel).string();
    return summary;
}

nlohmann::json cmd_tune(const PipelineConfig& config) {
    const auto catalog = load_catalog_artifact(config);
    const auto sequences = load_sequences_artifact(config);
    const auto index = load_index_artifact(config);
    const auto validation = split_of(sequences, Split::validation);
    if (validation.empty()) {
        throw DataError("validation split is empty; cannot tune");
    }
    auto loaded = open_generator(config);

    std::vector<ValidationCase> cases(validation.size());
    parallel_for(validation.size(), config.workers, [&](std::size_t i) {
        const auto& sequence = validation[i];
        std::vector<std::string> history(sequence.items.begin(), sequence.items.end() - 1);
        const auto titles = titles_of(history, catalog);
        auto generated = loaded.generator->generate(format_prompt(titles), titles,
                                                    config.generator.beam_size,
                                                    config.generator.max_query_tokens);
        std::stable_sort(generated.queries.begin(), generated.queries.end(),
                         [](const Query& a, const Query& b) { return a.score > b.score; });
        cases[i] = ValidationCase{std::move(generated.queries), sequence.items.back()};
    });

    const TuneResult result =
        tune_params(index, cases, config.tuning_k, config.grid, config.workers);

    double best_recall = 0.0;
    for (const auto& point : result.report) {
        if (point.k1 == result.params.k1 && point.b == result.params.b) {
            best_recall = point.recall;
        }
    }
    nlohmann::json params;
    params["format_version"] = 1;
    params["k1"] = result.params.k1;
    params["b"] = result.params.b;
    params["tuning_k"] = config.tuning_k;
    params["recall"] = best_recall;
    atomic_write(artifact(config, artifacts::kParams), params.dump(2) + "\n");
    atomic_write(artifact(config, artifacts::kGridReport), grid_report_to_tsv(result.report));
    return params;
}

nlohmann::json cmd_recommend(const PipelineConfig& config,
                             const std::optional<std::string>& user_id) {
    const auto catalog = load_catalog_artifact(config);
    const auto sequences = load_sequences_artifact(config);
    const auto index = load_index_artifact(config);
    const auto params = load_params_artifact(config);
    auto loaded = open_generator(config);

    RecommendOptions options;
    options.m = config.generator.beam_size;
    options.k = max_k(config);
    options.max_query_tokens = config.generator.max_query_tokens;
    options.exclude_history = config.exclude_history;

    if (user_id) {
        const auto it = std::find_if(sequences.begin(), sequences.end(),
                                     [&](const UserSequence& s) { return s.user_id == *user_id; });
        if (it == sequences.end()) {
            throw DataError("unknown user: " + *user_id);
        }
        const auto recommendation = recommend_for_user(
            it->user_id, it->items, catalog, *loaded.generator, index, params, options);
        return recommendation_to_json(recommendation);
    }

    std::vector<const UserSequence*> users;
    users.reserve(sequences.size());
    for (const auto& sequence : sequences) {
        users.push_back(&sequence);
    }
    std::sort(users.begin(), users.end(), [](const UserSequence* a, const UserSequence* b) {
        return a->user_id < b->user_id;
    });
    std::vector<nlohmann::json> records(users.size());
    parallel_for(users.size(), config.workers, [&](std::size_t i) {
        records[i] = recommendation_to_json(recommend_for_user(users[i]->user_id, users[i]->items,
                                                               catalog, *loaded.generator, index,
                                                               params, options));
    });
    std::string out;
    for (const auto& record : records) {
        out += record.dump();
        out += "\n";
    }
    atomic_write(artifact(config, artifacts::kRecommendations), out);

    nlohmann::json summary;
    summary["users"] = users.size();
    summary["recommendations_file"] = artifact(config, artifacts::kRecommendations).string();
    return summary;
}

nlohmann::json cmd_eval(const PipelineConfig& config, const std::vector<int>& m_values) {
    const auto catalog = load_catalog_artifact(config);
    const auto sequences = load_sequences_artifact(config);
    const auto index = load_index_artifact(config);
    const auto params = load_params_artifact(config);
    auto loaded = open_generator(config);

    const auto test_split = split_of(sequences, Split::test);
    if (test_split.empty()) {
        throw DataError("test split is empty; cannot evaluate");
    }

    std::vector<int> ms = m_values;
    if (ms.empty()) {
        ms.push_back(config.generator.beam_size);
    }

    nlohmann::json reports;
    for (int m : ms) {
        if (m < 1) {
            throw UsageError("every m must be at least 1");
        }
        RecommendOptions options;
        options.m = m;
        options.k = max_k(config);
        options.max_query_tokens = config.generator.max_query_tokens;
        options.exclude_history = config.exclude_history;

        const auto report = evaluate_split(
            test_split, catalog,
            [&](const UserSequence& sequence, const std::vector<std::string>& history) {
                return recommend_for_user(sequence.user_id, history, catalog, *loaded.generator,
                                          index, params, options);
            },
            config.ks, /*keep_user_rows=*/false, config.workers);

        nlohmann::json payload = report.to_json(false);
        payload["m"] = m;
        payload["k1"] = params.k1;
        payload["b"] = params.b;
        payload["seed"] = config.seed;
        atomic_write(config.work_dir / artifacts::metrics_file(m), payload.dump(2) + "\n");
        reports[std::to_string(m)] = std::move(payload);
    }
    return reports;
}

} // namespace queryrec

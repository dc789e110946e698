#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "queryrec/config.hpp"
#include "queryrec/errors.hpp"
#include "queryrec/pipeline.hpp"

namespace {

using queryrec::PipelineConfig;

struct GlobalFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> m;
    std::vector<std::size_t> ks;
    std::optional<unsigned> workers;
    std::optional<std::string> generator;
    bool exclude_history = false;
    std::string interactions;
    std::string catalog;
    std::string work_dir;
};

void add_common_flags(CLI::App* cmd, GlobalFlags& flags, bool with_m = true) {
    cmd->add_option("--config", flags.config_path, "JSON config file; flags override its keys");
    cmd->add_option("--seed", flags.seed, "RNG seed for splitting and artifacts");
    if (with_m) {
        cmd->add_option("--m", flags.m, "number of generated queries (beam size)");
    }
    cmd->add_option("--k", flags.ks, "recommendation list sizes K (repeatable)");
    cmd->add_option("--workers", flags.workers, "worker threads (0 = all cores)");
    cmd->add_option("--generator", flags.generator,
                    "query source: builtin or external:<command>");
    cmd->add_flag("--exclude-history", flags.exclude_history,
                  "drop previously interacted items from recommendations");
    cmd->add_option("--interactions", flags.interactions, "interaction events file (jsonl)");
    cmd->add_option("--catalog", flags.catalog, "item catalog file (jsonl)");
    cmd->add_option("--work-dir", flags.work_dir, "artifact directory");
}

PipelineConfig resolve_config(const GlobalFlags& flags) {
    PipelineConfig config;
    if (!flags.config_path.empty()) {
        config = PipelineConfig::from_file(flags.config_path);
    }
    if (flags.seed) {
        config.seed = *flags.seed;
    }
    if (flags.m) {
        config.generator.beam_size = *flags.m;
    }
    if (!flags.ks.empty()) {
        config.ks = flags.ks;
    }
    if (flags.workers) {
        config.workers = *flags.workers;
    }
    if (flags.generator) {
        config.set_generator_spec(*flags.generator);
    }
    if (flags.exclude_history) {
        config.exclude_history = true;
    }
    if (!flags.interactions.empty()) {
        config.interactions = flags.interactions;
    }
    if (!flags.catalog.empty()) {
        config.catalog = flags.catalog;
    }
    if (!flags.work_dir.empty()) {
        config.work_dir = flags.work_dir;
    }
    config.validate();
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generative query recommendation pipeline: prompt -> queries -> BM25 -> merge"};
    app.require_subcommand(1);

    GlobalFlags flags;
    auto* prepare = app.add_subcommand("prepare", "ingest and split the interaction data");
    auto* train = app.add_subcommand("train", "fit the query generator on the train split");
    auto* tune = app.add_subcommand("tune", "grid-search BM25 k1/b on the validation split");
    auto* recommend = app.add_subcommand("recommend", "emit queries and items for users");
    auto* eval = app.add_subcommand("eval", "score the test split (recall/diversity/coverage)");
    for (auto* cmd : {prepare, train, tune, recommend}) {
        add_common_flags(cmd, flags);
    }
    add_common_flags(eval, flags, /*with_m=*/false);

    std::string user_id;
    bool all_users = false;
    recommend->add_option("--user", user_id, "user to recommend for");
    recommend->add_flag("--all", all_users, "recommend for every user into the work dir");

    std::vector<int> eval_ms;
    eval->add_option("--m", eval_ms, "query counts to sweep, one report each (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help
        }
        std::cerr << e.what() << "\n";
        return queryrec::UsageError::exit_code;
    }

    try {
        const PipelineConfig config = resolve_config(flags);
        nlohmann::json output;
        if (prepare->parsed()) {
            output = queryrec::cmd_prepare(config);
        } else if (train->parsed()) {
            output = queryrec::cmd_train(config);
        } else if (tune->parsed()) {
            output = queryrec::cmd_tune(config);
        } else if (recommend->parsed()) {
            if (user_id.empty() && !all_users) {
                throw queryrec::UsageError("recommend needs --user <id> or --all");
            }
            if (!user_id.empty() && all_users) {
                throw queryrec::UsageError("--user and --all are mutually exclusive");
            }
            output = queryrec::cmd_recommend(
                config, all_users ? std::nullopt : std::make_optional(user_id));
        } else if (eval->parsed()) {
            output = queryrec::cmd_eval(config, eval_ms);
        }
        std::cout << output.dump(2) << "\n";
        return 0;
    } catch (const queryrec::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return queryrec::UsageError::exit_code;
    } catch (const queryrec::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return queryrec::DataError::exit_code;
    } catch (const queryrec::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return queryrec::IoError::exit_code;
    } catch (const queryrec::ProtocolError& e) {
        std::cerr << "protocol error: " << e.what() << "\n";
        return queryrec::ProtocolError::exit_code;
    } catch (const queryrec::TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return queryrec::TransportError::exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 70;
    }
}

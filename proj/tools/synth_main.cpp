#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "queryrec/errors.hpp"
#include "queryrec/jsonl.hpp"
#include "queryrec/synthetic.hpp"

// Writes the bundled multi-interest benchmark dataset: a catalog partitioned
// into category vocabularies and users whose histories mix a few categories.
int main(int argc, char** argv) {
    CLI::App app{"Generate the synthetic multi-interest dataset"};

    queryrec::SyntheticSpec spec;
    std::string interactions_path = "interactions.jsonl";
    std::string catalog_path = "catalog.jsonl";
    app.add_option("--users", spec.users, "number of users");
    app.add_option("--categories", spec.categories, "number of category vocabularies");
    app.add_option("--categories-per-user", spec.categories_per_user,
                   "interests sampled per user");
    app.add_option("--words-per-category", spec.words_per_category, "vocabulary size per category");
    app.add_option("--items-per-category", spec.items_per_category, "catalog items per category");
    app.add_option("--seed", spec.seed, "RNG seed");
    app.add_option("--interactions", interactions_path, "output events file");
    app.add_option("--catalog", catalog_path, "output catalog file");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto data = queryrec::make_synthetic(spec);
        queryrec::atomic_write(interactions_path, queryrec::interactions_to_jsonl(data.events));
        queryrec::atomic_write(catalog_path, queryrec::catalog_to_jsonl(data.catalog));
        std::cout << "wrote " << data.catalog.size() << " items and " << data.events.size()
                  << " events\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 70;
    }
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "queryrec/corpus.hpp"

namespace queryrec {

/// Knobs for the bundled multi-interest benchmark: a catalog partitioned
/// into category-specific vocabularies, and users whose histories sample a
/// few categories each.
struct SyntheticSpec {
    std::size_t users = 1000;
    std::size_t categories = 10;
    std::size_t categories_per_user = 3;
    std::size_t words_per_category = 20;
    std::size_t items_per_category = 100;
    std::size_t title_words_min = 3;
    std::size_t title_words_max = 6;
    std::size_t history_min = 8;
    std::size_t history_max = 15;
    std::size_t brands_per_category = 4;
    double brand_missing_rate = 0.2;
    std::uint64_t seed = 42;
};

struct SyntheticData {
    Catalog catalog;
    std::vector<InteractionEvent> events;
};

/// Deterministic for a given spec; titles are drawn from per-category word
/// pools, so items of one category share vocabulary and categories stay
/// lexically disjoint.
SyntheticData make_synthetic(const SyntheticSpec& spec);

std::string interactions_to_jsonl(const std::vector<InteractionEvent>& events);

} // namespace queryrec

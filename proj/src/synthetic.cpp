#include "queryrec/synthetic.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "queryrec/jsonl.hpp"

namespace queryrec {

namespace {

const char* const kCategoryNames[] = {"aero",  "bloom", "cedar", "drift", "ember",
                                      "frost", "grove", "haze",  "iris",  "jade",
                                      "kelp",  "lumen", "mica",  "nova",  "onyx",
                                      "pine",  "quill", "reef",  "sable", "tide"};

std::string zero_padded(std::size_t value, int width) {
    std::string digits = std::to_string(value);
    while (digits.size() < static_cast<std::size_t>(width)) {
        digits.insert(digits.begin(), '0');
    }
    return digits;
}

std::string category_name(std::size_t index) {
    constexpr std::size_t kNamed = sizeof(kCategoryNames) / sizeof(kCategoryNames[0]);
    if (index < kNamed) {
        return kCategoryNames[index];
    }
    return "cat" + zero_padded(index, 2);
}

// Explicit modulo draw keeps the data pinned to this code rather than to a
// standard-library distribution implementation.
std::size_t draw(std::mt19937_64& rng, std::size_t bound) {
    return static_cast<std::size_t>(rng() % bound);
}

} // namespace

SyntheticData make_synthetic(const SyntheticSpec& spec) {
    if (spec.categories < 1 || spec.categories_per_user < 1 ||
        spec.categories_per_user > spec.categories || spec.words_per_category < 1 ||
        spec.items_per_category < 1 || spec.title_words_min < 1 ||
        spec.title_words_max < spec.title_words_min || spec.history_min < 2 ||
        spec.history_max < spec.history_min || spec.history_max > kMaxSequenceLength ||
        spec.history_max > spec.categories_per_user * spec.items_per_category) {
        throw std::invalid_argument("inconsistent synthetic data spec");
    }

    std::mt19937_64 rng(spec.seed);
    SyntheticData data;

    std::vector<std::vector<std::string>> item_ids_by_category(spec.categories);
    for (std::size_t cat = 0; cat < spec.categories; ++cat) {
        const std::string name = category_name(cat);
        std::vector<std::string> words;
        words.reserve(spec.words_per_category);
        for (std::size_t w = 0; w < spec.words_per_category; ++w) {
            words.push_back(name + zero_padded(w, 2));
        }

        for (std::size_t i = 0; i < spec.items_per_category; ++i) {
            Item item;
            item.item_id = "i-" + name + "-" + zero_padded(i, 4);
            const std::size_t title_words =
                spec.title_words_min + draw(rng, spec.title_words_max - spec.title_words_min + 1);
            for (std::size_t w = 0; w < title_words; ++w) {
                if (w > 0) {
                    item.title += ' ';
                }
                item.title += words[draw(rng, words.size())];
            }
            item.categories = {name};
            const bool has_brand =
                static_cast<double>(draw(rng, 1000)) >= spec.brand_missing_rate * 1000.0;
            if (has_brand && spec.brands_per_category > 0) {
                item.brand = name + "-brand-" + std::to_string(draw(rng, spec.brands_per_category));
            }
            item_ids_by_category[cat].push_back(item.item_id);
            data.catalog.emplace(item.item_id, std::move(item));
        }
    }

    for (std::size_t u = 0; u < spec.users; ++u) {
        const std::string user_id = "u-" + zero_padded(u, 5);

        std::vector<std::size_t> cats(spec.categories);
        for (std::size_t c = 0; c < spec.categories; ++c) {
            cats[c] = c;
        }
        for (std::size_t c = 0; c < spec.categories_per_user; ++c) {
            std::swap(cats[c], cats[c + draw(rng, spec.categories - c)]);
        }
        cats.resize(spec.categories_per_user);

        std::vector<std::string> pool;
        for (std::size_t cat : cats) {
            pool.insert(pool.end(), item_ids_by_category[cat].begin(),
                        item_ids_by_category[cat].end());
        }
        const std::size_t history =
            spec.history_min + draw(rng, spec.history_max - spec.history_min + 1);
        for (std::size_t pick = 0; pick < history; ++pick) {
            std::swap(pool[pick], pool[pick + draw(rng, pool.size() - pick)]);
            data.events.push_back(
                InteractionEvent{user_id, pool[pick], static_cast<std::int64_t>(1000 + pick)});
        }
    }
    return data;
}

std::string interactions_to_jsonl(const std::vector<InteractionEvent>& events) {
    std::string out;
    for (const auto& event : events) {
        json record;
        record["user_id"] = event.user_id;
        record["item_id"] = event.item_id;
        record["timestamp"] = event.timestamp;
        out += record.dump();
        out += "\n";
    }
    return out;
}

} // namespace queryrec

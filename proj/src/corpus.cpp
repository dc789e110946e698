#include "queryrec/corpus.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "queryrec/errors.hpp"
#include "queryrec/jsonl.hpp"
#include "queryrec/vocabulary.hpp"

namespace queryrec {

std::string to_string(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        case Split::test: return "test";
    }
    throw std::invalid_argument("bad split value");
}

Split split_from_string(const std::string& text) {
    if (text == "train") return Split::train;
    if (text == "validation") return Split::validation;
    if (text == "test") return Split::test;
    throw DataError("unknown split label: " + text);
}

namespace {

std::optional<Item> parse_catalog_record(const json& record) {
    if (!record.is_object() || !record.contains("item_id") || !record["item_id"].is_string() ||
        !record.contains("title") || !record["title"].is_string()) {
        return std::nullopt;
    }
    Item item;
    item.item_id = record["item_id"].get<std::string>();
    item.title = record["title"].get<std::string>();
    if (item.item_id.empty()) {
        return std::nullopt;
    }
    if (record.contains("categories")) {
        if (!record["categories"].is_array()) {
            return std::nullopt;
        }
        for (const auto& entry : record["categories"]) {
            if (!entry.is_string()) {
                return std::nullopt;
            }
            item.categories.insert(entry.get<std::string>());
        }
    }
    if (record.contains("brand") && !record["brand"].is_null()) {
        if (!record["brand"].is_string()) {
            return std::nullopt;
        }
        item.brand = record["brand"].get<std::string>();
    }
    return item;
}

} // namespace

CatalogLoad load_catalog(const std::filesystem::path& path) {
    CatalogLoad load;
    for_each_jsonl(
        path,
        [&](std::size_t line_no, const json& record) {
            auto item = parse_catalog_record(record);
            if (!item) {
                warn(path.string() + ":" + std::to_string(line_no) + ": malformed catalog record, skipped");
                ++load.dropped;
                return;
            }
            if (item->title.empty() || item->title.size() > kMaxTitleLength) {
                ++load.dropped;
                return;
            }
            if (!load.items.emplace(item->item_id, std::move(*item)).second) {
                warn(path.string() + ":" + std::to_string(line_no) + ": duplicate item_id " +
                     record["item_id"].get<std::string>() + ", first record kept");
                ++load.dropped;
            }
        },
        [&](std::size_t line_no, const std::string&) {
            warn(path.string() + ":" + std::to_string(line_no) + ": not valid JSON, skipped");
            ++load.dropped;
        });
    return load;
}

InteractionLoad load_interactions(const std::filesystem::path& path) {
    InteractionLoad load;
    for_each_jsonl(
        path,
        [&](std::size_t line_no, const json& record) {
            if (!record.is_object() || !record.contains("user_id") || !record["user_id"].is_string() ||
                !record.contains("item_id") || !record["item_id"].is_string() ||
                !record.contains("timestamp") || !record["timestamp"].is_number_integer() ||
                record["timestamp"].get<std::int64_t>() < 0) {
                warn(path.string() + ":" + std::to_string(line_no) + ": malformed interaction record, skipped");
                ++load.dropped;
                return;
            }
            load.events.push_back({record["user_id"].get<std::string>(),
                                   record["item_id"].get<std::string>(),
                                   record["timestamp"].get<std::int64_t>()});
        },
        [&](std::size_t line_no, const std::string&) {
            warn(path.string() + ":" + std::to_string(line_no) + ": not valid JSON, skipped");
            ++load.dropped;
        });
    return load;
}

SequenceBuild build_sequences(const std::vector<InteractionEvent>& events, const Catalog& catalog) {
    SequenceBuild build;
    std::map<std::string, std::vector<const InteractionEvent*>> by_user;
    for (const auto& event : events) {
        if (catalog.find(event.item_id) == catalog.end()) {
            ++build.dropped_events;
            continue;
        }
        by_user[event.user_id].push_back(&event);
    }

    for (auto& [user_id, user_events] : by_user) {
        std::sort(user_events.begin(), user_events.end(),
                  [](const InteractionEvent* a, const InteractionEvent* b) {
                      if (a->timestamp != b->timestamp) {
                          return a->timestamp < b->timestamp;
                      }
                      return a->item_id < b->item_id;
                  });

        std::vector<std::string> items;
        std::unordered_set<std::string> seen;
        for (const auto* event : user_events) {
            if (seen.insert(event->item_id).second) {
                items.push_back(event->item_id);
            }
        }
        if (items.size() > kMaxSequenceLength) {
            items.erase(items.begin(), items.end() - static_cast<std::ptrdiff_t>(kMaxSequenceLength));
        }
        if (items.size() < kMinSequenceLength) {
            ++build.dropped_users;
            continue;
        }
        build.sequences.push_back({user_id, std::move(items), Split::train});
    }
    return build;
}

void split_users(std::vector<UserSequence>& sequences, std::uint64_t seed) {
    const std::size_t n = sequences.size();
    if (n < 10) {
        throw DataError("need at least 10 users to form non-empty splits, got " + std::to_string(n));
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    // Shuffle positions of the user_id-sorted view so the assignment does not
    // depend on input order. Hand-rolled Fisher-Yates pins the byte-exact
    // behaviour to this code rather than the standard library.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return sequences[a].user_id < sequences[b].user_id;
    });
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(order[i], order[j]);
    }

    const std::size_t train_count = n * 8 / 10;      // floor(0.8 N)
    const std::size_t validation_count = n / 10;     // floor(0.1 N)
    for (std::size_t rank = 0; rank < n; ++rank) {
        Split split = Split::test;
        if (rank < train_count) {
            split = Split::train;
        } else if (rank < train_count + validation_count) {
            split = Split::validation;
        }
        sequences[order[rank]].split = split;
    }
}

std::string format_prompt(const std::vector<std::string>& titles) {
    if (titles.empty()) {
        throw std::invalid_argument("format_prompt needs at least one title");
    }
    std::string text = "Previously, the customer has bought: ";
    for (const auto& title : titles) {
        text += title;
        text += ". ";
    }
    text += "In the future, the customer wants to buy ";
    return text;
}

const Item& require_item(const Catalog& catalog, const std::string& item_id) {
    auto it = catalog.find(item_id);
    if (it == catalog.end()) {
        throw DataError("item not in catalog: " + item_id);
    }
    return it->second;
}

std::vector<std::string> titles_of(const std::vector<std::string>& item_ids, const Catalog& catalog) {
    std::vector<std::string> titles;
    titles.reserve(item_ids.size());
    for (const auto& id : item_ids) {
        titles.push_back(require_item(catalog, id).title);
    }
    return titles;
}

std::string make_training_line(const UserSequence& sequence, const Catalog& catalog) {
    if (sequence.items.size() < 2) {
        throw std::invalid_argument("training line needs a sequence of at least 2 items");
    }
    std::vector<std::string> history(sequence.items.begin(), sequence.items.end() - 1);
    std::string line = format_prompt(titles_of(history, catalog));
    line += require_item(catalog, sequence.items.back()).title;
    line += Vocabulary::kEosText;
    return line;
}

std::string catalog_to_jsonl(const Catalog& catalog) {
    std::string out;
    for (const auto& [item_id, item] : catalog) {
        json record;
        record["item_id"] = item_id;
        record["title"] = item.title;
        record["categories"] = item.categories;
        if (item.brand) {
            record["brand"] = *item.brand;
        }
        out += record.dump();
        out += "\n";
    }
    return out;
}

Catalog catalog_from_jsonl_file(const std::filesystem::path& path) {
    auto load = load_catalog(path);
    return std::move(load.items);
}

std::string sequences_to_jsonl(const std::vector<UserSequence>& sequences) {
    std::string out;
    for (const auto& sequence : sequences) {
        json record;
        record["user_id"] = sequence.user_id;
        record["items"] = sequence.items;
        record["split"] = to_string(sequence.split);
        out += record.dump();
        out += "\n";
    }
    return out;
}

std::vector<UserSequence> sequences_from_jsonl_file(const std::filesystem::path& path) {
    std::vector<UserSequence> sequences;
    for_each_jsonl(
        path,
        [&](std::size_t line_no, const json& record) {
            if (!record.is_object() || !record.contains("user_id") || !record.contains("items") ||
                !record.contains("split")) {
                throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad sequence record");
            }
            UserSequence sequence;
            sequence.user_id = record["user_id"].get<std::string>();
            sequence.items = record["items"].get<std::vector<std::string>>();
            sequence.split = split_from_string(record["split"].get<std::string>());
            sequences.push_back(std::move(sequence));
        },
        [&](std::size_t line_no, const std::string&) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": not valid JSON");
        });
    return sequences;
}

} // namespace queryrec

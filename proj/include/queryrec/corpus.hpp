#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace queryrec {

/// Longest title kept by catalog ingestion; longer ones count as noise.
inline constexpr std::size_t kMaxTitleLength = 400;

/// Hard cap on the per-user interaction window after dedup.
inline constexpr std::size_t kMaxSequenceLength = 15;

/// Fewest items a usable sequence can have (one history item + one target).
inline constexpr std::size_t kMinSequenceLength = 2;

struct Item {
    std::string item_id;
    std::string title;
    std::set<std::string> categories;
    std::optional<std::string> brand;
};

using Catalog = std::map<std::string, Item>;

struct InteractionEvent {
    std::string user_id;
    std::string item_id;
    std::int64_t timestamp = 0;
};

enum class Split { train, validation, test };

std::string to_string(Split split);
Split split_from_string(const std::string& text);

struct UserSequence {
    std::string user_id;
    std::vector<std::string> items; // time-ordered, deduplicated, length in [2, 15]
    Split split = Split::train;
};

struct Prompt {
    std::string text;
    std::string user_id;
};

struct CatalogLoad {
    Catalog items;
    std::size_t dropped = 0; // missing/overlong titles, malformed or duplicate records
};

struct InteractionLoad {
    std::vector<InteractionEvent> events;
    std::size_t dropped = 0; // malformed records
};

struct SequenceBuild {
    std::vector<UserSequence> sequences;
    std::size_t dropped_events = 0; // events pointing outside the catalog
    std::size_t dropped_users = 0;  // users left with fewer than 2 items
};

/// Line-delimited records {item_id, title, categories: [..], brand?}.
/// Records with missing titles or titles over 400 characters are dropped;
/// malformed lines are skipped with a warning, never aborting the load.
CatalogLoad load_catalog(const std::filesystem::path& path);

/// Line-delimited records {user_id, item_id, timestamp}.
InteractionLoad load_interactions(const std::filesystem::path& path);

/// Per user: orders events by (timestamp, item_id), removes duplicate items
/// keeping the first occurrence, keeps the most recent 15, and drops users
/// with fewer than 2 items left. Events whose item is not in the catalog are
/// dropped and counted.
SequenceBuild build_sequences(const std::vector<InteractionEvent>& events, const Catalog& catalog);

/// Assigns splits by a seeded shuffle of the users: floor(0.8 N) train,
/// floor(0.1 N) validation, remainder test. Deterministic for a given seed
/// regardless of the input order. Throws DataError when N < 10.
void split_users(std::vector<UserSequence>& sequences, std::uint64_t seed);

/// Renders `Previously, the customer has bought: <T1>. <T2>. ... In the
/// future, the customer wants to buy ` with the trailing space. Throws
/// std::invalid_argument on an empty title list.
std::string format_prompt(const std::vector<std::string>& titles);

/// Prompt over items 1..T-1 followed by the title of item T and the
/// terminator marker. Throws std::invalid_argument on sequences shorter
/// than 2 and DataError when an item is missing from the catalog.
std::string make_training_line(const UserSequence& sequence, const Catalog& catalog);

/// Title lookup that throws DataError instead of returning a default.
const Item& require_item(const Catalog& catalog, const std::string& item_id);

std::vector<std::string> titles_of(const std::vector<std::string>& item_ids, const Catalog& catalog);

// Deterministic snapshots of prepared artifacts.
std::string catalog_to_jsonl(const Catalog& catalog);
Catalog catalog_from_jsonl_file(const std::filesystem::path& path);
std::string sequences_to_jsonl(const std::vector<UserSequence>& sequences);
std::vector<UserSequence> sequences_from_jsonl_file(const std::filesystem::path& path);

} // namespace queryrec

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "queryrec/corpus.hpp"
#include "queryrec/recommend.hpp"

namespace queryrec {

enum class Attribute { category, brand };

std::string to_string(Attribute attribute);

/// Attribute set of an item: its categories, or a singleton of its brand.
/// A missing brand yields the empty set.
std::set<std::string> attribute_set(const Item& item, Attribute attribute);

/// |A intersect B| / |A union B|; two empty sets count as identical (1),
/// one empty set against a non-empty one scores 0.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

/// 1 iff the target appears in the first min(k, size) recommended items.
int recall_at_k(std::span<const std::string> recommended, const std::string& target,
                std::size_t k);

/// Per-user diversity: 1 minus the mean pairwise Jaccard over all k(k-1)
/// ordered pairs of attribute sets among the first k items. Users whose
/// list is shorter than k are skipped (nullopt). Throws on k < 2.
std::optional<double> diversity_at_k(std::span<const std::string> recommended,
                                     const Catalog& catalog, Attribute attribute, std::size_t k);

/// |union(recommended attrs) intersect union(history attrs)| /
/// |union(history attrs)| over the first min(k, size) recommended items.
/// Users whose history attribute union is empty are skipped (nullopt).
std::optional<double> coverage_at_k(std::span<const std::string> recommended,
                                    std::span<const std::string> history, const Catalog& catalog,
                                    Attribute attribute, std::size_t k);

struct AttributeMetric {
    std::optional<double> value; // mean over qualifying users; absent when none qualify
    std::size_t users = 0;
    std::size_t skipped = 0;
};

struct MetricsReport {
    std::vector<std::size_t> ks;
    std::size_t users_evaluated = 0;
    std::map<std::size_t, double> recall;
    std::map<std::string, std::map<std::size_t, AttributeMetric>> diversity; // by attribute name
    std::map<std::string, std::map<std::size_t, AttributeMetric>> coverage;
    nlohmann::json per_user = nlohmann::json::array(); // audit rows, optional

    nlohmann::json to_json(bool include_per_user) const;
};

/// Produces one recommendation list for a test user given its history
/// prefix. Must be safe to call concurrently.
using RecommenderFn =
    std::function<RecommendationList(const UserSequence&, const std::vector<std::string>&)>;

/// Next-item protocol over the test split: history = items 1..T-1, target =
/// item T. The recommender should return at least max(ks) items when the
/// corpus allows; every metric at smaller K reads a prefix of that one list.
/// Throws DataError on an empty split.
MetricsReport evaluate_split(const std::vector<UserSequence>& test_sequences,
                             const Catalog& catalog, const RecommenderFn& recommend,
                             const std::vector<std::size_t>& ks, bool keep_user_rows = false,
                             unsigned workers = 1);

} // namespace queryrec

#include "queryrec/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "queryrec/errors.hpp"
#include "queryrec/parallel.hpp"

namespace queryrec {

std::string to_string(Attribute attribute) {
    switch (attribute) {
        case Attribute::category: return "category";
        case Attribute::brand: return "brand";
    }
    throw std::invalid_argument("bad attribute value");
}

std::set<std::string> attribute_set(const Item& item, Attribute attribute) {
    if (attribute == Attribute::category) {
        return item.categories;
    }
    std::set<std::string> brand;
    if (item.brand) {
        brand.insert(*item.brand);
    }
    return brand;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) {
        return 1.0;
    }
    std::size_t intersection = 0;
    for (const auto& element : a) {
        if (b.count(element) > 0) {
            ++intersection;
        }
    }
    const std::size_t union_size = a.size() + b.size() - intersection;
    return static_cast<double>(intersection) / static_cast<double>(union_size);
}

int recall_at_k(std::span<const std::string> recommended, const std::string& target,
                std::size_t k) {
    if (k < 1) {
        throw std::invalid_argument("recall needs K >= 1");
    }
    const std::size_t limit = std::min(k, recommended.size());
    for (std::size_t i = 0; i < limit; ++i) {
        if (recommended[i] == target) {
            return 1;
        }
    }
    return 0;
}

std::optional<double> diversity_at_k(std::span<const std::string> recommended,
                                     const Catalog& catalog, Attribute attribute, std::size_t k) {
    if (k < 2) {
        throw std::invalid_argument("diversity needs K >= 2");
    }
    if (recommended.size() < k) {
        return std::nullopt;
    }
    std::vector<std::set<std::string>> sets;
    sets.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        sets.push_back(attribute_set(require_item(catalog, recommended[i]), attribute));
    }
    double similarity_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (i == j) {
                continue;
            }
            similarity_sum += jaccard(sets[i], sets[j]);
        }
    }
    return 1.0 - similarity_sum / static_cast<double>(k * (k - 1));
}

std::optional<double> coverage_at_k(std::span<const std::string> recommended,
                                    std::span<const std::string> history, const Catalog& catalog,
                                    Attribute attribute, std::size_t k) {
    if (k < 1) {
        throw std::invalid_argument("coverage needs K >= 1");
    }
    std::set<std::string> history_union;
    for (const auto& item_id : history) {
        auto attrs = attribute_set(require_item(catalog, item_id), attribute);
        history_union.insert(attrs.begin(), attrs.end());
    }
    if (history_union.empty()) {
        return std::nullopt;
    }
    std::set<std::string> recommended_union;
    const std::size_t limit = std::min(k, recommended.size());
    for (std::size_t i = 0; i < limit; ++i) {
        auto attrs = attribute_set(require_item(catalog, recommended[i]), attribute);
        recommended_union.insert(attrs.begin(), attrs.end());
    }
    std::size_t intersection = 0;
    for (const auto& element : recommended_union) {
        if (history_union.count(element) > 0) {
            ++intersection;
        }
    }
    return static_cast<double>(intersection) / static_cast<double>(history_union.size());
}

nlohmann::json MetricsReport::to_json(bool include_per_user) const {
    nlohmann::json payload;
    payload["format_version"] = 1;
    payload["ks"] = ks;
    payload["users_evaluated"] = users_evaluated;

    nlohmann::json recall_json;
    for (const auto& [k, value] : recall) {
        recall_json[std::to_string(k)] = value;
    }
    payload["recall"] = std::move(recall_json);

    auto attribute_block = [](const std::map<std::string, std::map<std::size_t, AttributeMetric>>&
                                  metrics) {
        nlohmann::json block;
        for (const auto& [attribute, by_k] : metrics) {
            nlohmann::json attr_json;
            for (const auto& [k, metric] : by_k) {
                nlohmann::json cell;
                cell["value"] = metric.value ? nlohmann::json(*metric.value) : nlohmann::json();
                cell["users"] = metric.users;
                cell["skipped"] = metric.skipped;
                attr_json[std::to_string(k)] = std::move(cell);
            }
            block[attribute] = std::move(attr_json);
        }
        return block;
    };
    payload["diversity"] = attribute_block(diversity);
    payload["coverage"] = attribute_block(coverage);
    if (include_per_user) {
        payload["per_user"] = per_user;
    }
    return payload;
}

MetricsReport evaluate_split(const std::vector<UserSequence>& test_sequences,
                             const Catalog& catalog, const RecommenderFn& recommend,
                             const std::vector<std::size_t>& ks, bool keep_user_rows,
                             unsigned workers) {
    if (test_sequences.empty()) {
        throw DataError("cannot evaluate an empty test split");
    }
    if (ks.empty()) {
        throw std::invalid_argument("evaluate_split needs at least one K");
    }

    std::vector<const UserSequence*> users;
    users.reserve(test_sequences.size());
    for (const auto& sequence : test_sequences) {
        users.push_back(&sequence);
    }
    std::sort(users.begin(), users.end(), [](const UserSequence* a, const UserSequence* b) {
        return a->user_id < b->user_id;
    });

    // Recommendation fan-out is the expensive part; metrics fold afterwards
    // in fixed user order so aggregates stay deterministic.
    std::vector<RecommendationList> recommendations(users.size());
    parallel_for(users.size(), workers, [&](std::size_t i) {
        const UserSequence& sequence = *users[i];
        std::vector<std::string> history(sequence.items.begin(), sequence.items.end() - 1);
        recommendations[i] = recommend(sequence, history);
    });

    MetricsReport report;
    report.ks = ks;
    report.users_evaluated = users.size();

    const std::vector<Attribute> attributes{Attribute::category, Attribute::brand};
    std::map<std::size_t, double> recall_sum;
    struct Accumulator {
        double sum = 0.0;
        std::size_t users = 0;
        std::size_t skipped = 0;
    };
    std::map<std::string, std::map<std::size_t, Accumulator>> diversity_acc;
    std::map<std::string, std::map<std::size_t, Accumulator>> coverage_acc;

    for (std::size_t i = 0; i < users.size(); ++i) {
        const UserSequence& sequence = *users[i];
        const std::string& target = sequence.items.back();
        std::vector<std::string> history(sequence.items.begin(), sequence.items.end() - 1);
        std::vector<std::string> items;
        items.reserve(recommendations[i].items.size());
        for (const auto& item : recommendations[i].items) {
            items.push_back(item.item_id);
        }

        nlohmann::json row;
        if (keep_user_rows) {
            row["user_id"] = sequence.user_id;
            row["target"] = target;
            int target_rank = 0;
            for (std::size_t pos = 0; pos < items.size(); ++pos) {
                if (items[pos] == target) {
                    target_rank = static_cast<int>(pos) + 1;
                    break;
                }
            }
            row["target_rank"] = target_rank;
        }

        for (std::size_t k : ks) {
            const int hit = recall_at_k(items, target, k);
            recall_sum[k] += static_cast<double>(hit);
            if (keep_user_rows) {
                row["recall"][std::to_string(k)] = hit;
            }
            for (Attribute attribute : attributes) {
                const std::string name = to_string(attribute);
                if (k >= 2) {
                    auto& slot = diversity_acc[name][k];
                    if (auto value = diversity_at_k(items, catalog, attribute, k)) {
                        slot.sum += *value;
                        ++slot.users;
                    } else {
                        ++slot.skipped;
                    }
                }
                auto& cov = coverage_acc[name][k];
                if (auto value = coverage_at_k(items, history, catalog, attribute, k)) {
                    cov.sum += *value;
                    ++cov.users;
                } else {
                    ++cov.skipped;
                }
            }
        }
        if (keep_user_rows) {
            report.per_user.push_back(std::move(row));
        }
    }

    for (std::size_t k : ks) {
        report.recall[k] = recall_sum[k] / static_cast<double>(users.size());
    }
    auto finalize = [](const std::map<std::string, std::map<std::size_t, Accumulator>>& acc) {
        std::map<std::string, std::map<std::size_t, AttributeMetric>> out;
        for (const auto& [name, by_k] : acc) {
            for (const auto& [k, slot] : by_k) {
                AttributeMetric metric;
                metric.users = slot.users;
                metric.skipped = slot.skipped;
                if (slot.users > 0) {
                    metric.value = slot.sum / static_cast<double>(slot.users);
                }
                out[name][k] = metric;
            }
        }
        return out;
    };
    report.diversity = finalize(diversity_acc);
    report.coverage = finalize(coverage_acc);
    return report;
}

} // namespace queryrec

#include "queryrec/recommend.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "queryrec/errors.hpp"
#include "queryrec/jsonl.hpp"

namespace queryrec {

std::vector<RecommendedItem> merge_results(const std::vector<std::vector<SearchHit>>& hit_lists,
                                           std::size_t k) {
    const std::size_t m = hit_lists.size();
    if (m == 0) {
        throw std::invalid_argument("merge_results needs at least one query result");
    }

    const std::size_t base_quota = k / m;
    const std::size_t extras = k % m; // the highest-scored queries absorb the remainder

    std::vector<RecommendedItem> selected;
    std::unordered_set<std::string> taken;
    std::vector<std::size_t> cursor(m, 0);

    auto take_next_unused = [&](std::size_t query) -> bool {
        const auto& hits = hit_lists[query];
        while (cursor[query] < hits.size()) {
            const SearchHit& hit = hits[cursor[query]++];
            if (taken.insert(hit.item_id).second) {
                selected.push_back(
                    RecommendedItem{hit.item_id, static_cast<int>(query), hit.rank});
                return true;
            }
        }
        return false;
    };

    for (std::size_t query = 0; query < m && selected.size() < k; ++query) {
        const std::size_t quota = base_quota + (query < extras ? 1 : 0);
        for (std::size_t taken_here = 0; taken_here < quota && selected.size() < k; ++taken_here) {
            if (!take_next_unused(query)) {
                break;
            }
        }
    }

    // Backfill: short hit lists must not shrink the recommendation below K.
    bool progressed = true;
    while (selected.size() < k && progressed) {
        progressed = false;
        for (std::size_t query = 0; query < m && selected.size() < k; ++query) {
            if (take_next_unused(query)) {
                progressed = true;
            }
        }
    }
    return selected;
}

RecommendationList recommend_for_user(const std::string& user_id,
                                      const std::vector<std::string>& history_item_ids,
                                      const Catalog& catalog, QueryGenerator& generator,
                                      const InvertedIndex& index, const Bm25Params& params,
                                      const RecommendOptions& options) {
    if (options.m < 1 || options.k < 1) {
        throw std::invalid_argument("recommend_for_user needs m >= 1 and K >= 1");
    }
    const auto history_titles = titles_of(history_item_ids, catalog);
    const std::string prompt = format_prompt(history_titles);

    GenerationResult generated =
        generator.generate(prompt, history_titles, options.m, options.max_query_tokens);
    if (generated.queries.empty()) {
        throw DataError("generator returned no queries for user " + user_id);
    }
    if (generated.queries.size() < static_cast<std::size_t>(options.m)) {
        warn("user " + user_id + ": generator produced " +
             std::to_string(generated.queries.size()) + " of " + std::to_string(options.m) +
             " queries; quotas recomputed over the actual count");
        generated.deficit = true;
    }
    std::stable_sort(generated.queries.begin(), generated.queries.end(),
                     [](const Query& a, const Query& b) { return a.score > b.score; });

    std::unordered_set<std::string> history_set(history_item_ids.begin(), history_item_ids.end());
    std::vector<std::vector<SearchHit>> hit_lists;
    hit_lists.reserve(generated.queries.size());
    for (const auto& query : generated.queries) {
        auto hits = index.search(params, query.text, options.k);
        if (options.exclude_history) {
            // Filtered hits keep their original ranks so provenance still
            // points into the stored result list.
            std::erase_if(hits, [&](const SearchHit& hit) {
                return history_set.count(hit.item_id) > 0;
            });
        }
        hit_lists.push_back(std::move(hits));
    }

    RecommendationList result;
    result.user_id = user_id;
    result.queries = std::move(generated.queries);
    result.items = merge_results(hit_lists, options.k);
    result.query_deficit = generated.deficit;
    return result;
}

} // namespace queryrec

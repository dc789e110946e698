#pragma once

#include <string>
#include <vector>

#include "queryrec/bm25.hpp"
#include "queryrec/corpus.hpp"
#include "queryrec/generator.hpp"

namespace queryrec {

struct RecommendedItem {
    std::string item_id;
    int source_query = 0; // 0-based index into the query list that surfaced it
    int source_rank = 0;  // rank within that query's hit list
};

struct RecommendationList {
    std::string user_id;
    std::vector<Query> queries; // generation-score descending
    std::vector<RecommendedItem> items;
    bool query_deficit = false;
};

/// Ranking-based merge of per-query hit lists, `hit_lists` ordered by
/// generation score descending. Quota per query: floor(K/m), with the
/// K mod m highest-scored queries getting one extra. Pass 1 fills quotas in
/// query order, skipping items already taken; pass 2 backfills round-robin
/// until K items or every list is exhausted. Output preserves selection
/// order. Throws std::invalid_argument on zero query results.
std::vector<RecommendedItem> merge_results(const std::vector<std::vector<SearchHit>>& hit_lists,
                                           std::size_t k);

struct RecommendOptions {
    int m = 5;
    std::size_t k = 20;
    int max_query_tokens = 12;
    bool exclude_history = false;
};

/// Prompt -> m queries -> per-query retrieval at depth K -> merge. History
/// items stay eligible unless exclude_history is set. Throws DataError when
/// the generator yields no queries at all; a short (but non-empty) query
/// list proceeds with quotas over the actual count and the deficit flag set.
RecommendationList recommend_for_user(const std::string& user_id,
                                      const std::vector<std::string>& history_item_ids,
                                      const Catalog& catalog, QueryGenerator& generator,
                                      const InvertedIndex& index, const Bm25Params& params,
                                      const RecommendOptions& options);

} // namespace queryrec

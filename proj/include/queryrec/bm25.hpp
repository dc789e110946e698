#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "queryrec/corpus.hpp"

namespace queryrec {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    void validate() const; // k1 in [0, 3], b in [0, 1]; throws UsageError
};

struct SearchHit {
    std::string item_id;
    double score = 0.0;
    int rank = 0; // dense from 1 within one result list
};

/// BM25 inverted index over tokenized item titles. Immutable after build;
/// concurrent searches are safe.
class InvertedIndex {
public:
    /// Tokenizes every catalog title and populates postings plus document
    /// statistics. Throws DataError on an empty catalog.
    static InvertedIndex build(const Catalog& catalog);

    std::size_t document_count() const { return doc_ids_.size(); }
    double average_doc_length() const { return avgdl_; }

    /// Token count of the document; throws DataError for unknown items.
    std::size_t doc_length(const std::string& item_id) const;

    /// Number of documents containing the term (0 for unseen terms).
    std::size_t document_frequency(const std::string& term) const;

    /// ln(1 + (N - n + 0.5) / (n + 0.5)); non-negative for every term.
    double idf(const std::string& term) const;

    /// BM25 score of one (query, document) pair. Distinct query terms are
    /// taken in first-occurrence order; terms absent from the document or
    /// the index contribute nothing. Throws DataError for unknown items.
    double score(const Bm25Params& params, std::span<const std::string> query_tokens,
                 const std::string& item_id) const;

    /// Up to top_k items with positive score, ranked by score descending,
    /// ties broken by item_id ascending. An empty query (no tokens) returns
    /// an empty list.
    std::vector<SearchHit> search(const Bm25Params& params, const std::string& query_text,
                                  std::size_t top_k) const;

    /// Item ids in internal document order (item_id ascending).
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }

    nlohmann::json to_json() const;
    static InvertedIndex from_json(const nlohmann::json& payload);

private:
    InvertedIndex() = default;

    double pair_score(const Bm25Params& params, std::span<const std::string> terms,
                      std::uint32_t doc) const;

    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::uint32_t> doc_index_;
    std::vector<std::uint32_t> doc_lengths_;
    double avgdl_ = 0.0;
    // term -> (doc, term frequency), docs ascending
    std::map<std::string, std::vector<std::pair<std::uint32_t, std::uint32_t>>> postings_;
};

/// Distinct tokens in first-occurrence order; shared by the engine and by
/// any scorer that must match it addition-for-addition.
std::vector<std::string> distinct_query_terms(std::span<const std::string> tokens);

} // namespace queryrec

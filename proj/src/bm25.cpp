#include "queryrec/bm25.hpp"

#include <algorithm>
#include <cmath>

#include "queryrec/errors.hpp"
#include "queryrec/tokenize.hpp"

namespace queryrec {

void Bm25Params::validate() const {
    if (!(k1 >= 0.0 && k1 <= 3.0)) {
        throw UsageError("k1 must be in [0, 3]");
    }
    if (!(b >= 0.0 && b <= 1.0)) {
        throw UsageError("b must be in [0, 1]");
    }
}

std::vector<std::string> distinct_query_terms(std::span<const std::string> tokens) {
    std::vector<std::string> distinct;
    for (const auto& token : tokens) {
        if (std::find(distinct.begin(), distinct.end(), token) == distinct.end()) {
            distinct.push_back(token);
        }
    }
    return distinct;
}

InvertedIndex InvertedIndex::build(const Catalog& catalog) {
    if (catalog.empty()) {
        throw DataError("cannot build an index over an empty catalog");
    }
    InvertedIndex index;
    index.doc_ids_.reserve(catalog.size());
    for (const auto& [item_id, item] : catalog) { // Catalog is ordered: docs end up item_id ascending
        const std::uint32_t doc = static_cast<std::uint32_t>(index.doc_ids_.size());
        index.doc_ids_.push_back(item_id);
        index.doc_index_.emplace(item_id, doc);

        std::map<std::string, std::uint32_t> frequencies;
        const auto tokens = tokenize(item.title);
        for (const auto& token : tokens) {
            ++frequencies[token];
        }
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        for (const auto& [term, tf] : frequencies) {
            index.postings_[term].emplace_back(doc, tf);
        }
    }

    std::uint64_t total_length = 0;
    for (std::uint32_t length : index.doc_lengths_) {
        total_length += length;
    }
    index.avgdl_ = static_cast<double>(total_length) / static_cast<double>(index.doc_ids_.size());
    return index;
}

std::size_t InvertedIndex::doc_length(const std::string& item_id) const {
    auto it = doc_index_.find(item_id);
    if (it == doc_index_.end()) {
        throw DataError("item not in index: " + item_id);
    }
    return doc_lengths_[it->second];
}

std::size_t InvertedIndex::document_frequency(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.size();
}

double InvertedIndex::idf(const std::string& term) const {
    const double n = static_cast<double>(document_frequency(term));
    const double N = static_cast<double>(document_count());
    return std::log(1.0 + (N - n + 0.5) / (n + 0.5));
}

double InvertedIndex::pair_score(const Bm25Params& params, std::span<const std::string> terms,
                                 std::uint32_t doc) const {
    const double norm =
        1.0 - params.b + params.b * static_cast<double>(doc_lengths_[doc]) / avgdl_;
    double total = 0.0;
    for (const auto& term : terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) {
            continue;
        }
        const auto& entries = it->second;
        auto entry = std::lower_bound(entries.begin(), entries.end(), doc,
                                      [](const auto& posting, std::uint32_t value) {
                                          return posting.first < value;
                                      });
        if (entry == entries.end() || entry->first != doc) {
            continue;
        }
        const double tf = static_cast<double>(entry->second);
        total += idf(term) * tf * (params.k1 + 1.0) / (tf + params.k1 * norm);
    }
    return total;
}

double InvertedIndex::score(const Bm25Params& params, std::span<const std::string> query_tokens,
                            const std::string& item_id) const {
    auto it = doc_index_.find(item_id);
    if (it == doc_index_.end()) {
        throw DataError("item not in index: " + item_id);
    }
    const auto terms = distinct_query_terms(query_tokens);
    return pair_score(params, terms, it->second);
}

std::vector<SearchHit> InvertedIndex::search(const Bm25Params& params,
                                             const std::string& query_text,
                                             std::size_t top_k) const {
    if (top_k < 1) {
        throw std::invalid_argument("search needs top_k >= 1");
    }
    const auto tokens = tokenize(query_text);
    std::vector<SearchHit> hits;
    if (tokens.empty()) {
        return hits;
    }
    const auto terms = distinct_query_terms(tokens);

    // Term-at-a-time accumulation; per document the additions happen in the
    // same distinct-term order as pair_score, so the sums match it exactly.
    std::vector<double> scores(doc_ids_.size(), 0.0);
    std::vector<std::uint32_t> touched;
    for (const auto& term : terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) {
            continue;
        }
        const double term_idf = idf(term);
        for (const auto& [doc, tf_int] : it->second) {
            if (scores[doc] == 0.0) {
                touched.push_back(doc);
            }
            const double norm =
                1.0 - params.b + params.b * static_cast<double>(doc_lengths_[doc]) / avgdl_;
            const double tf = static_cast<double>(tf_int);
            scores[doc] += term_idf * tf * (params.k1 + 1.0) / (tf + params.k1 * norm);
        }
    }

    std::sort(touched.begin(), touched.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) {
            return scores[a] > scores[b];
        }
        return a < b; // doc order is item_id order
    });

    for (std::uint32_t doc : touched) {
        if (hits.size() == top_k) {
            break;
        }
        if (!(scores[doc] > 0.0)) {
            continue;
        }
        hits.push_back(SearchHit{doc_ids_[doc], scores[doc], static_cast<int>(hits.size()) + 1});
    }
    return hits;
}

nlohmann::json InvertedIndex::to_json() const {
    nlohmann::json payload;
    payload["format_version"] = 1;
    nlohmann::json docs = nlohmann::json::array();
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        docs.push_back({doc_ids_[i], doc_lengths_[i]});
    }
    payload["documents"] = std::move(docs);
    nlohmann::json postings;
    for (const auto& [term, entries] : postings_) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& [doc, tf] : entries) {
            rows.push_back({doc, tf});
        }
        postings[term] = std::move(rows);
    }
    payload["postings"] = std::move(postings);
    return payload;
}

InvertedIndex InvertedIndex::from_json(const nlohmann::json& payload) {
    if (!payload.is_object() || payload.value("format_version", 0) != 1) {
        throw DataError("unsupported index snapshot format");
    }
    InvertedIndex index;
    for (const auto& row : payload.at("documents")) {
        const std::uint32_t doc = static_cast<std::uint32_t>(index.doc_ids_.size());
        index.doc_ids_.push_back(row.at(0).get<std::string>());
        index.doc_index_.emplace(index.doc_ids_.back(), doc);
        index.doc_lengths_.push_back(row.at(1).get<std::uint32_t>());
    }
    if (index.doc_ids_.empty()) {
        throw DataError("index snapshot has no documents");
    }
    for (const auto& [term, rows] : payload.at("postings").items()) {
        auto& entries = index.postings_[term];
        for (const auto& row : rows) {
            entries.emplace_back(row.at(0).get<std::uint32_t>(), row.at(1).get<std::uint32_t>());
        }
    }
    std::uint64_t total_length = 0;
    for (std::uint32_t length : index.doc_lengths_) {
        total_length += length;
    }
    index.avgdl_ = static_cast<double>(total_length) / static_cast<double>(index.doc_ids_.size());
    return index;
}

} // namespace queryrec

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "queryrec/vocabulary.hpp"

namespace queryrec {

/// Additive-smoothed n-gram model with exact order fallback: the shortest
/// truncation of the context that was seen in training answers the query,
/// lower orders never blend in. Contexts are padded with BOS; a line whose
/// text ends with the "</s>" marker also counts a terminal EOS.
///
/// Immutable once fitted; concurrent reads are safe.
class NGramModel {
public:
    struct ContextCounts {
        std::map<TokenId, std::uint64_t> counts;
        std::uint64_t total = 0;
    };

    /// Fits on raw lines, building the vocabulary from the corpus itself.
    /// Throws DataError on an empty corpus, std::invalid_argument on a bad
    /// order or alpha.
    static NGramModel fit(const std::vector<std::string>& lines, int order, double alpha);

    /// Fits against a fixed vocabulary; tokens outside it count as UNK on the
    /// context side and are skipped as prediction targets.
    static NGramModel fit_with_vocab(const std::vector<std::string>& lines, int order, double alpha,
                                     Vocabulary vocab);

    /// Probability over the whole vocabulary (dense, indexed by TokenId)
    /// given the preceding tokens. BOS and UNK always get 0; the rest sums
    /// to 1.
    std::vector<double> distribution(std::span<const TokenId> context) const;

    /// Convenience: P(token | context).
    double probability(std::span<const TokenId> context, TokenId token) const;

    int order() const { return order_; }
    double alpha() const { return alpha_; }
    const Vocabulary& vocab() const { return vocab_; }

    /// Count table for contexts of length `context_length` (0 = unigram).
    const std::map<std::vector<TokenId>, ContextCounts>& table(std::size_t context_length) const {
        return tables_.at(context_length);
    }

    nlohmann::json to_json() const;
    static NGramModel from_json(const nlohmann::json& payload);

private:
    NGramModel(int order, double alpha, Vocabulary vocab);

    void add_line(const std::string& line);

    int order_;
    double alpha_;
    Vocabulary vocab_;
    // tables_[k]: contexts of length k, k in [0, order-1]
    std::vector<std::map<std::vector<TokenId>, ContextCounts>> tables_;
};

} // namespace queryrec

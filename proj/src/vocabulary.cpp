#include "queryrec/vocabulary.hpp"

#include <algorithm>
#include <stdexcept>

namespace queryrec {

Vocabulary::Vocabulary() {
    tokens_ = {std::string(kBosText), std::string(kEosText), std::string(kUnkText)};
    for (TokenId i = 0; i < tokens_.size(); ++i) {
        ids_.emplace(tokens_[i], i);
    }
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
    std::vector<std::string> sorted = tokens;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    Vocabulary vocab;
    for (auto& token : sorted) {
        TokenId next = static_cast<TokenId>(vocab.tokens_.size());
        if (vocab.ids_.emplace(token, next).second) {
            vocab.tokens_.push_back(token);
        }
    }
    return vocab;
}

Vocabulary Vocabulary::from_id_ordered(const std::vector<std::string>& all_tokens) {
    if (all_tokens.size() < kReservedCount || all_tokens[kBos] != kBosText ||
        all_tokens[kEos] != kEosText || all_tokens[kUnk] != kUnkText) {
        throw std::invalid_argument("vocabulary list does not start with reserved markers");
    }
    Vocabulary vocab;
    vocab.tokens_ = all_tokens;
    vocab.ids_.clear();
    for (TokenId i = 0; i < vocab.tokens_.size(); ++i) {
        if (!vocab.ids_.emplace(vocab.tokens_[i], i).second) {
            throw std::invalid_argument("duplicate token in vocabulary list: " + vocab.tokens_[i]);
        }
    }
    return vocab;
}

TokenId Vocabulary::id(std::string_view token) const {
    auto it = ids_.find(std::string(token));
    return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
    return ids_.find(std::string(token)) != ids_.end();
}

const std::string& Vocabulary::text(TokenId id) const {
    return tokens_.at(id);
}

} // namespace queryrec

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace queryrec {

using TokenId = std::uint32_t;

/// Bidirectional token <-> id map with reserved BOS/EOS/UNK entries.
///
/// Layout: BOS = 0, EOS = 1, UNK = 2, then regular tokens in sorted order.
/// Ids are dense from 0. Regular tokens are plain lowercase alphanumeric
/// strings (tokenize() output), so they can never collide with the angled
/// reserved markers.
class Vocabulary {
public:
    static constexpr TokenId kBos = 0;
    static constexpr TokenId kEos = 1;
    static constexpr TokenId kUnk = 2;
    static constexpr std::size_t kReservedCount = 3;

    static constexpr std::string_view kBosText = "<s>";
    static constexpr std::string_view kEosText = "</s>";
    static constexpr std::string_view kUnkText = "<unk>";

    Vocabulary();

    /// Builds a vocabulary whose regular tokens are the sorted distinct
    /// strings in `tokens`.
    static Vocabulary from_tokens(const std::vector<std::string>& tokens);

    /// Reconstructs from an id-ordered token list (serialization form).
    static Vocabulary from_id_ordered(const std::vector<std::string>& all_tokens);

    /// Id for a token; unknown tokens map to kUnk.
    TokenId id(std::string_view token) const;

    bool contains(std::string_view token) const;

    const std::string& text(TokenId id) const;

    std::size_t size() const { return tokens_.size(); }

    /// Number of ids the model may predict: everything except BOS and UNK.
    std::size_t prediction_support() const { return tokens_.size() - 2; }

    /// True for ids that generation may emit (regular tokens and EOS).
    static bool predictable(TokenId id) { return id != kBos && id != kUnk; }

    /// Tokens in id order, reserved markers included.
    const std::vector<std::string>& id_ordered_tokens() const { return tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> ids_;
};

} // namespace queryrec

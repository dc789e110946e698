#include "queryrec/ngram.hpp"

#include <stdexcept>

#include "queryrec/errors.hpp"
#include "queryrec/tokenize.hpp"

namespace queryrec {

namespace {

/// Splits a raw line into its text body and whether it carries the terminal
/// "</s>" marker.
std::pair<std::string_view, bool> strip_terminator(std::string_view line) {
    if (line.ends_with(Vocabulary::kEosText)) {
        return {line.substr(0, line.size() - Vocabulary::kEosText.size()), true};
    }
    return {line, false};
}

} // namespace

NGramModel::NGramModel(int order, double alpha, Vocabulary vocab)
    : order_(order), alpha_(alpha), vocab_(std::move(vocab)) {
    if (order_ < 2) {
        throw std::invalid_argument("n-gram order must be at least 2");
    }
    if (!(alpha_ > 0.0)) {
        throw std::invalid_argument("smoothing alpha must be positive");
    }
    tables_.resize(static_cast<std::size_t>(order_));
}

NGramModel NGramModel::fit(const std::vector<std::string>& lines, int order, double alpha) {
    if (lines.empty()) {
        throw DataError("cannot fit an n-gram model on an empty corpus");
    }
    std::vector<std::string> all_tokens;
    for (const auto& line : lines) {
        auto [body, _] = strip_terminator(line);
        for (auto& token : tokenize(body)) {
            all_tokens.push_back(std::move(token));
        }
    }
    return fit_with_vocab(lines, order, alpha, Vocabulary::from_tokens(all_tokens));
}

NGramModel NGramModel::fit_with_vocab(const std::vector<std::string>& lines, int order, double alpha,
                                      Vocabulary vocab) {
    if (lines.empty()) {
        throw DataError("cannot fit an n-gram model on an empty corpus");
    }
    NGramModel model(order, alpha, std::move(vocab));
    for (const auto& line : lines) {
        model.add_line(line);
    }
    return model;
}

void NGramModel::add_line(const std::string& line) {
    auto [body, terminated] = strip_terminator(line);

    std::vector<TokenId> ids(static_cast<std::size_t>(order_ - 1), Vocabulary::kBos);
    for (const auto& token : tokenize(body)) {
        ids.push_back(vocab_.id(token));
    }
    if (terminated) {
        ids.push_back(Vocabulary::kEos);
    }

    const std::size_t pad = static_cast<std::size_t>(order_ - 1);
    for (std::size_t pos = pad; pos < ids.size(); ++pos) {
        TokenId target = ids[pos];
        if (!Vocabulary::predictable(target)) {
            continue; // out-of-vocabulary target, context side still advances
        }
        for (std::size_t k = 0; k < static_cast<std::size_t>(order_); ++k) {
            std::vector<TokenId> context(ids.begin() + static_cast<std::ptrdiff_t>(pos - k),
                                         ids.begin() + static_cast<std::ptrdiff_t>(pos));
            auto& slot = tables_[k][std::move(context)];
            ++slot.counts[target];
            ++slot.total;
        }
    }
}

std::vector<double> NGramModel::distribution(std::span<const TokenId> context) const {
    const std::size_t max_len = std::min(context.size(), static_cast<std::size_t>(order_ - 1));
    const ContextCounts* slot = nullptr;
    for (std::size_t k = max_len + 1; k-- > 0;) {
        std::vector<TokenId> suffix(context.end() - static_cast<std::ptrdiff_t>(k), context.end());
        auto it = tables_[k].find(suffix);
        if (it != tables_[k].end()) {
            slot = &it->second;
            break;
        }
    }

    static const ContextCounts empty_counts;
    if (slot == nullptr) {
        slot = &empty_counts; // untrained or degenerate model: uniform smoothing mass
    }

    const double support = static_cast<double>(vocab_.prediction_support());
    const double denom = static_cast<double>(slot->total) + alpha_ * support;
    std::vector<double> probs(vocab_.size(), 0.0);
    for (TokenId id = 0; id < probs.size(); ++id) {
        if (!Vocabulary::predictable(id)) {
            continue;
        }
        auto it = slot->counts.find(id);
        const double count = it == slot->counts.end() ? 0.0 : static_cast<double>(it->second);
        probs[id] = (count + alpha_) / denom;
    }
    return probs;
}

double NGramModel::probability(std::span<const TokenId> context, TokenId token) const {
    return distribution(context).at(token);
}

nlohmann::json NGramModel::to_json() const {
    nlohmann::json payload;
    payload["format_version"] = 1;
    payload["order"] = order_;
    payload["alpha"] = alpha_;
    payload["vocabulary"] = vocab_.id_ordered_tokens();
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& table : tables_) {
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& [context, slot] : table) {
            nlohmann::json counts = nlohmann::json::array();
            for (const auto& [token, count] : slot.counts) {
                counts.push_back({token, count});
            }
            entries.push_back({{"context", context}, {"counts", counts}});
        }
        tables.push_back(std::move(entries));
    }
    payload["tables"] = std::move(tables);
    return payload;
}

NGramModel NGramModel::from_json(const nlohmann::json& payload) {
    if (!payload.is_object() || payload.value("format_version", 0) != 1) {
        throw DataError("unsupported n-gram model format");
    }
    NGramModel model(payload.at("order").get<int>(), payload.at("alpha").get<double>(),
                     Vocabulary::from_id_ordered(payload.at("vocabulary").get<std::vector<std::string>>()));
    const auto& tables = payload.at("tables");
    if (!tables.is_array() || tables.size() != model.tables_.size()) {
        throw DataError("n-gram model table count does not match order");
    }
    for (std::size_t k = 0; k < model.tables_.size(); ++k) {
        for (const auto& entry : tables[k]) {
            auto context = entry.at("context").get<std::vector<TokenId>>();
            if (context.size() != k) {
                throw DataError("n-gram model context length mismatch");
            }
            ContextCounts slot;
            for (const auto& pair : entry.at("counts")) {
                TokenId token = pair.at(0).get<TokenId>();
                std::uint64_t count = pair.at(1).get<std::uint64_t>();
                slot.counts[token] = count;
                slot.total += count;
            }
            model.tables_[k].emplace(std::move(context), std::move(slot));
        }
    }
    return model;
}

} // namespace queryrec

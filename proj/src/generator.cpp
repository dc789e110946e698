#include "queryrec/generator.hpp"

#include <cmath>
#include <stdexcept>

#include "queryrec/beam.hpp"
#include "queryrec/errors.hpp"
#include "queryrec/tokenize.hpp"

namespace queryrec {

void GeneratorConfig::validate() const {
    if (mode == Mode::external && external_command.empty()) {
        throw UsageError("external generator mode needs a command");
    }
    if (history_bias < 0.0 || history_bias > 1.0) {
        throw UsageError("history_bias must be in [0, 1]");
    }
    if (max_query_tokens < 1) {
        throw UsageError("max_query_tokens must be at least 1");
    }
    if (beam_size < 1) {
        throw UsageError("beam size m must be at least 1");
    }
}

double generation_score(std::span<const double> token_log_probs, double gamma) {
    if (token_log_probs.empty()) {
        throw std::invalid_argument("generation_score of a zero-length query");
    }
    double sum = 0.0;
    for (double log_prob : token_log_probs) {
        sum += log_prob;
    }
    return sum / std::pow(static_cast<double>(token_log_probs.size()), gamma);
}

InterpolatedModel::InterpolatedModel(const NGramModel& global,
                                     const std::vector<std::string>& history_titles, double lambda)
    : global_(global), lambda_(lambda) {
    if (lambda_ < 0.0 || lambda_ > 1.0) {
        throw std::invalid_argument("history bias lambda must be in [0, 1]");
    }
    if (lambda_ > 0.0 && !history_titles.empty()) {
        // Each title is one complete utterance, terminated so the history
        // component learns where queries may stop.
        std::vector<std::string> lines;
        lines.reserve(history_titles.size());
        for (const auto& title : history_titles) {
            lines.push_back(title + std::string(Vocabulary::kEosText));
        }
        history_ = NGramModel::fit_with_vocab(lines, global_.order(), global_.alpha(), global_.vocab());
    }
}

std::vector<double> InterpolatedModel::next_token_distribution(
    std::span<const TokenId> context) const {
    std::vector<double> probs = global_.distribution(context);
    if (!history_ || lambda_ == 0.0) {
        return probs;
    }
    const std::vector<double> history_probs = history_->distribution(context);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        probs[i] = (1.0 - lambda_) * probs[i] + lambda_ * history_probs[i];
    }
    return probs;
}

std::vector<double> PromptBoundModel::next_probabilities(std::span<const TokenId> generated) const {
    std::vector<TokenId> context = prompt_;
    context.insert(context.end(), generated.begin(), generated.end());
    return model_.next_token_distribution(context);
}

GenerationResult BuiltinGenerator::generate(const std::string& prompt,
                                            const std::vector<std::string>& history_titles, int m,
                                            int max_tokens) {
    InterpolatedModel mixture(model_, history_titles, lambda_);

    std::vector<TokenId> prompt_context;
    for (const auto& token : tokenize(prompt)) {
        prompt_context.push_back(model_.vocab().id(token));
    }
    PromptBoundModel bound(mixture, std::move(prompt_context));
    return generate_queries(bound, m, max_tokens, gamma_);
}

} // namespace queryrec

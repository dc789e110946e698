#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "queryrec/ngram.hpp"
#include "queryrec/vocabulary.hpp"

namespace queryrec {

/// A generated search query and its generation score S (higher is better).
struct Query {
    std::string text;
    double score = 0.0;
};

struct GenerationResult {
    std::vector<Query> queries; // sorted by score descending
    /// Set when the model's support could not produce the requested number
    /// of distinct queries.
    bool deficit = false;
};

struct GeneratorConfig {
    enum class Mode { builtin, external };

    Mode mode = Mode::builtin;
    std::string external_command; // used when mode == external
    double history_bias = 0.5;    // lambda in [0, 1]
    int max_query_tokens = 12;
    int beam_size = 5; // m

    void validate() const; // throws UsageError on out-of-range fields
};

/// Length-normalized log-likelihood: S = sum(log P) / len^gamma.
/// gamma = 0 gives the plain sum. Throws std::invalid_argument on an empty
/// continuation.
double generation_score(std::span<const double> token_log_probs, double gamma);

/// Next-token distribution source the beam decoder consumes: probabilities
/// over the full vocabulary given the tokens generated so far.
class ConditionalModel {
public:
    virtual ~ConditionalModel() = default;
    virtual const Vocabulary& vocab() const = 0;
    virtual std::vector<double> next_probabilities(std::span<const TokenId> generated) const = 0;
};

/// (1 - lambda) * global + lambda * history mixture, where the history
/// component is an n-gram of the same order fitted on the user's history
/// titles alone, sharing the global vocabulary. The history model is fitted
/// once at construction.
class InterpolatedModel {
public:
    InterpolatedModel(const NGramModel& global, const std::vector<std::string>& history_titles,
                      double lambda);

    /// Mixture distribution given the full token context (prompt included).
    std::vector<double> next_token_distribution(std::span<const TokenId> context) const;

    const Vocabulary& vocab() const { return global_.vocab(); }

private:
    const NGramModel& global_;
    std::optional<NGramModel> history_;
    double lambda_;
};

/// InterpolatedModel bound to a fixed prompt context, ready for decoding.
class PromptBoundModel : public ConditionalModel {
public:
    PromptBoundModel(const InterpolatedModel& model, std::vector<TokenId> prompt_context)
        : model_(model), prompt_(std::move(prompt_context)) {}

    const Vocabulary& vocab() const override { return model_.vocab(); }

    std::vector<double> next_probabilities(std::span<const TokenId> generated) const override;

private:
    const InterpolatedModel& model_;
    std::vector<TokenId> prompt_;
};

/// Query source for the recommendation pipeline. Implementations must be
/// safe to call from multiple threads.
class QueryGenerator {
public:
    virtual ~QueryGenerator() = default;

    /// Produces up to `m` queries for the prompt. `history_titles` feed the
    /// built-in history-biased mixture; external generators ignore them.
    virtual GenerationResult generate(const std::string& prompt,
                                      const std::vector<std::string>& history_titles, int m,
                                      int max_tokens) = 0;
};

/// Beam-search decoder over the trained n-gram, the desk-scale stand-in for
/// a neural generator.
class BuiltinGenerator : public QueryGenerator {
public:
    BuiltinGenerator(const NGramModel& model, double history_bias, double gamma)
        : model_(model), lambda_(history_bias), gamma_(gamma) {}

    GenerationResult generate(const std::string& prompt,
                              const std::vector<std::string>& history_titles, int m,
                              int max_tokens) override;

private:
    const NGramModel& model_;
    double lambda_;
    double gamma_;
};

} // namespace queryrec

#include "queryrec/beam.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace queryrec {

namespace {

bool beam_order(const Hypothesis& a, const Hypothesis& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return std::lexicographical_compare(a.tokens.begin(), a.tokens.end(), b.tokens.begin(),
                                        b.tokens.end());
}

} // namespace

Beam initial_beam() {
    Beam beam;
    beam.hypotheses.push_back(Hypothesis{});
    return beam;
}

Beam beam_step(const Beam& beam, const ConditionalModel& model, int m, double gamma) {
    if (beam.hypotheses.empty()) {
        throw std::invalid_argument("beam_step on an empty beam");
    }
    bool any_unfinished =
        std::any_of(beam.hypotheses.begin(), beam.hypotheses.end(),
                    [](const Hypothesis& hypothesis) { return !hypothesis.finished; });
    if (!any_unfinished) {
        throw std::invalid_argument("beam_step with every hypothesis finished");
    }

    Beam next;
    next.step = beam.step + 1;
    for (const auto& hypothesis : beam.hypotheses) {
        if (hypothesis.finished) {
            next.hypotheses.push_back(hypothesis);
            continue;
        }
        const auto probs = model.next_probabilities(hypothesis.tokens);
        for (TokenId token = 0; token < probs.size(); ++token) {
            if (!(probs[token] > 0.0)) {
                continue; // zero-probability extensions are not viable
            }
            Hypothesis extended = hypothesis;
            extended.tokens.push_back(token);
            extended.token_log_probs.push_back(std::log(probs[token]));
            extended.score = generation_score(extended.token_log_probs, gamma);
            extended.finished = (token == Vocabulary::kEos);
            next.hypotheses.push_back(std::move(extended));
        }
    }

    std::sort(next.hypotheses.begin(), next.hypotheses.end(), beam_order);
    if (next.hypotheses.size() > static_cast<std::size_t>(m)) {
        next.hypotheses.resize(static_cast<std::size_t>(m));
    }
    return next;
}

GenerationResult generate_queries(const ConditionalModel& model, int m, int max_len, double gamma) {
    if (m < 1 || max_len < 1) {
        throw std::invalid_argument("generate_queries needs m >= 1 and max_len >= 1");
    }

    Beam beam = initial_beam();
    for (int step = 0; step < max_len; ++step) {
        if (beam.hypotheses.empty()) {
            break;
        }
        bool any_unfinished =
            std::any_of(beam.hypotheses.begin(), beam.hypotheses.end(),
                        [](const Hypothesis& hypothesis) { return !hypothesis.finished; });
        if (!any_unfinished) {
            break;
        }
        beam = beam_step(beam, model, m, gamma);
    }

    GenerationResult result;
    const Vocabulary& vocab = model.vocab();
    std::vector<std::vector<TokenId>> seen;
    for (const auto& hypothesis : beam.hypotheses) {
        if (hypothesis.tokens.empty()) {
            continue; // seed hypothesis survived only if the model had no support at all
        }
        if (std::find(seen.begin(), seen.end(), hypothesis.tokens) != seen.end()) {
            continue;
        }
        seen.push_back(hypothesis.tokens);
        std::string text;
        for (TokenId token : hypothesis.tokens) {
            if (token == Vocabulary::kEos) {
                break;
            }
            if (!text.empty()) {
                text += ' ';
            }
            text += vocab.text(token);
        }
        result.queries.push_back(Query{std::move(text), hypothesis.score});
    }
    result.deficit = result.queries.size() < static_cast<std::size_t>(m);
    return result;
}

} // namespace queryrec

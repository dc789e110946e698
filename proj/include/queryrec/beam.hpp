#pragma once

#include <vector>

#include "queryrec/generator.hpp"
#include "queryrec/vocabulary.hpp"

namespace queryrec {

/// One partial or finished query in the beam. `tokens` holds generated ids
/// including the terminal EOS once finished; `score` is always
/// generation_score(token_log_probs, gamma).
struct Hypothesis {
    std::vector<TokenId> tokens;
    std::vector<double> token_log_probs;
    double score = 0.0;
    bool finished = false;
};

struct Beam {
    std::vector<Hypothesis> hypotheses; // sorted by score desc, ties lexicographic on token ids
    std::size_t step = 0;
};

/// Seed beam: the single empty hypothesis.
Beam initial_beam();

/// Extends every unfinished hypothesis by every positive-probability token,
/// carries finished hypotheses unchanged at their final score, and keeps the
/// top-m of the union. Throws std::invalid_argument when every hypothesis is
/// already finished.
Beam beam_step(const Beam& beam, const ConditionalModel& model, int m, double gamma);

/// Runs beam_step until every hypothesis reached EOS or max_len tokens, then
/// renders the surviving hypotheses (EOS stripped, tokens space-joined) in
/// score order. Result carries fewer than m queries, with the deficit flag
/// set, when the model's support cannot fill the beam.
GenerationResult generate_queries(const ConditionalModel& model, int m, int max_len, double gamma);

} // namespace queryrec

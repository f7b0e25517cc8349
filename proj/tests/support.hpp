// Helpers for building hand-written histories in tests.

#pragma once

#include <vector>

#include "vcsim/core.hpp"

namespace vcsim::testing {

struct RoundSpec {
    std::vector<std::vector<int>> choices;  // [voter][candidate]
    std::vector<CandidateId> elected;
    std::vector<CandidateId> unavailable;
    std::vector<std::vector<double>> merits; // empty = all zero
};

inline void push_round(HistoryLedger& ledger, const RoundSpec& spec) {
    const auto n = ledger.voters();
    const auto m = ledger.candidates();
    ChoiceMatrix c(n, m, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) c(i, j) = static_cast<std::uint8_t>(spec.choices[i][j]);
    Grid<double> merits(n, m, 0.0);
    for (std::size_t i = 0; i < spec.merits.size(); ++i)
        for (std::size_t j = 0; j < m; ++j) merits(i, j) = spec.merits[i][j];

    RoundOutcome out;
    out.round = ledger.rounds_completed() + 1;
    out.scores.assign(m, 0.0);
    out.elected_set = spec.elected;
    out.rewards.assign(n, 0.0);
    out.unavailable.assign(m, 0);
    for (auto j : spec.unavailable) out.unavailable[j] = 1;
    out.profits = Grid<double>(n, m, 0.0);
    out.trust = Grid<double>(n, m, 1.0);
    out.choices = c;
    ledger.append_round(out, c, merits);
}

} // namespace vcsim::testing

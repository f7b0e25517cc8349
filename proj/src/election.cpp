#include "vcsim/election.hpp"

#include <algorithm>
#include <numeric>

namespace vcsim {

double candidate_score(std::span<const std::uint8_t> choices, std::span<const double> trust,
                       std::span<const int> stakes) {
    require(choices.size() == trust.size() && trust.size() == stakes.size(),
            ErrorKind::validation, "choice, trust and stake vectors must have equal length");
    double s = 0.0;
    for (std::size_t i = 0; i < choices.size(); ++i) {
        if (choices[i]) s += static_cast<double>(stakes[i]) * trust[i];
    }
    return s;
}

ScoreBoard score_board(RoundIndex round, const ChoiceMatrix& choices, const Grid<double>& trust,
                       std::span<const int> stakes) {
    require(choices.rows() == stakes.size() && trust.rows() == stakes.size() &&
                choices.cols() == trust.cols(),
            ErrorKind::validation, "score inputs have mismatched shapes");
    ScoreBoard board{round, std::vector<double>(choices.cols(), 0.0)};
    std::vector<std::uint8_t> c(stakes.size());
    std::vector<double> t(stakes.size());
    for (CandidateId j = 0; j < choices.cols(); ++j) {
        for (VoterId i = 0; i < stakes.size(); ++i) {
            c[i] = choices(i, j);
            t[i] = trust(i, j);
        }
        board.entries[j] = candidate_score(c, t, stakes);
    }
    return board;
}

std::vector<CandidateId> elect(const ScoreBoard& board, std::size_t k) {
    const auto& s = board.entries;
    require(k <= s.size(), ErrorKind::configuration, "k_supernodes exceeds num_candidates");
    std::vector<CandidateId> ids(s.size());
    std::iota(ids.begin(), ids.end(), CandidateId{0});
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(),
                      [&](CandidateId a, CandidateId b) {
                          if (s[a] != s[b]) return s[a] > s[b];
                          return a < b;
                      });
    ids.resize(k);
    return ids;
}

RewardSplit distribute_reward(std::span<const double> weights, double block_reward,
                              bool available) {
    require(block_reward > 0.0, ErrorKind::configuration, "block_reward must be positive");
    RewardSplit split{std::vector<double>(weights.size(), 0.0), false};
    if (!available) return split;

    double total = 0.0;
    for (double w : weights)
        if (w > 0.0) total += w;
    if (total <= 0.0) {
        split.escrowed = true;
        return split;
    }
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] > 0.0) split.shares[i] = block_reward * (weights[i] / total);
    return split;
}

} // namespace vcsim

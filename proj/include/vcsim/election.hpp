// Candidate scores, the K-winner election and the block-reward split.

#pragma once

#include <span>
#include <vector>

#include "vcsim/core.hpp"

namespace vcsim {

inline constexpr double kDefaultBlockReward = 12.5;

struct ScoreBoard {
    RoundIndex round = 1;
    std::vector<double> entries; // S_j^k for every candidate
};

/// S_j = sum_i s_i * t_ij * c_ij over one candidate's column.
double candidate_score(std::span<const std::uint8_t> choices, std::span<const double> trust,
                       std::span<const int> stakes);

ScoreBoard score_board(RoundIndex round, const ChoiceMatrix& choices, const Grid<double>& trust,
                       std::span<const int> stakes);

/// K highest scores, ties by ascending id, returned in rank order.
std::vector<CandidateId> elect(const ScoreBoard& board, std::size_t k);

struct RewardSplit {
    std::vector<double> shares; // R_ij for one candidate j, per voter
    bool escrowed = false;      // available but no supporter had positive weight
};

/// Splits block_reward over supporters in proportion to their positive
/// weights s_i t_ij c_ij. Nonpositive weights get nothing; an unavailable
/// candidate pays nothing.
RewardSplit distribute_reward(std::span<const double> weights, double block_reward,
                              bool available);

} // namespace vcsim

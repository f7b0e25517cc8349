// Shared domain types and the append-only round history.
//
// Rounds are 1-indexed. Round k's data is visible once append_round has
// accepted it; earlier rounds are never rewritten.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vcsim/error.hpp"

namespace vcsim {

using VoterId = std::size_t;
using CandidateId = std::size_t;
using RoundIndex = std::size_t;

// Dense row-major 2-D array.
template <class T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<T>& data() const noexcept { return data_; }

    bool operator==(const Grid&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

// c_ij^k for one round: rows are voters, columns candidates, values 0/1.
using ChoiceMatrix = Grid<std::uint8_t>;

struct VoterProfile {
    VoterId id = 0;
    int stake = 1;
};

struct CandidateProfile {
    CandidateId id = 0;
    double true_unavailability = 0.0;
    int capability_rank = 1; // 1 = most capable
};

void validate_voters(std::span<const VoterProfile> voters);
void validate_candidates(std::span<const CandidateProfile> candidates);

struct RoundOutcome {
    RoundIndex round = 0;
    std::vector<double> scores;             // S_j^k, one per candidate
    std::vector<CandidateId> elected_set;   // rank order: highest score first
    std::vector<double> rewards;            // per voter, Σ_j R_ij^k
    std::vector<std::uint8_t> unavailable;  // per candidate
    Grid<double> profits;                   // R_ij^k
    Grid<double> trust;                     // t_ij^k (all ones when trust is off)
    ChoiceMatrix choices;                   // c_ij^k as cast, after any bribery
    std::vector<std::uint8_t> escrowed;     // per candidate: elected, available, no positive weight
    bool negative_score_elected = false;
};

struct Cumulative {
    double merit = 0.0;       // M_ij^t
    std::uint32_t count = 0;  // C_ij^t
};

// Raw counts over rounds 1..through for one (voter i, peer r, candidate j).
struct PairCounts {
    std::uint32_t rounds = 0;        // through
    std::uint32_t self_chosen = 0;   // Σ c_ij
    std::uint32_t peer_chosen = 0;   // Σ c_rj
    std::uint32_t both_chosen = 0;   // Σ c_ij c_rj
    std::uint32_t elected = 0;       // Σ e_j
    std::uint32_t peer_and_elected = 0;  // Σ c_rj e_j
    std::uint32_t self_and_elected = 0;  // Σ c_ij e_j
};

class HistoryLedger {
public:
    HistoryLedger(std::size_t voters, std::size_t candidates, std::size_t k);

    std::size_t voters() const noexcept { return voters_; }
    std::size_t candidates() const noexcept { return candidates_; }
    std::size_t k() const noexcept { return k_; }
    RoundIndex rounds_completed() const noexcept { return rounds_.size(); }

    // Validates and appends round rounds_completed()+1. On any error the
    // ledger is left untouched.
    void append_round(const RoundOutcome& outcome, const ChoiceMatrix& choices,
                      const Grid<double>& merits);

    bool choice(VoterId i, CandidateId j, RoundIndex round) const;
    double merit(VoterId i, CandidateId j, RoundIndex round) const;
    double profit(VoterId i, CandidateId j, RoundIndex round) const;
    bool elected(CandidateId j, RoundIndex round) const;
    bool unavailable(CandidateId j, RoundIndex round) const;

    // (M_ij, C_ij) summed over rounds 1..through_round.
    Cumulative cumulative(VoterId i, CandidateId j, RoundIndex through_round) const;

    std::uint32_t times_elected(CandidateId j, RoundIndex through_round) const;
    std::uint32_t times_unavailable(CandidateId j, RoundIndex through_round) const;

    PairCounts pair_counts(VoterId i, VoterId r, CandidateId j, RoundIndex through_round) const;

    bool operator==(const HistoryLedger&) const = default;

private:
    struct RoundRecord {
        ChoiceMatrix choices;
        Grid<double> merits;
        Grid<double> profits;
        std::vector<std::uint8_t> elected;
        std::vector<std::uint8_t> unavailable;
        // Running totals through this round.
        Grid<double> merit_total;
        Grid<std::uint32_t> choice_total;
        std::vector<std::uint32_t> elected_total;
        std::vector<std::uint32_t> unavailable_total;

        bool operator==(const RoundRecord&) const = default;
    };

    void check_round(RoundIndex round, RoundIndex through) const;
    void check_pair(VoterId i, CandidateId j) const;

    std::size_t voters_;
    std::size_t candidates_;
    std::size_t k_;
    std::vector<RoundRecord> rounds_;
    // Totals over all completed rounds, indexed [i][r][j] and [i][j].
    std::vector<std::uint32_t> co_choice_;
    Grid<std::uint32_t> chosen_and_elected_;
};

} // namespace vcsim

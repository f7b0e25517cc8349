#include "vcsim/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace vcsim {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::sequencing: return "sequencing";
    case ErrorKind::validation: return "validation";
    case ErrorKind::out_of_range: return "out_of_range";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::domain: return "domain";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::stability: return "stability";
    case ErrorKind::insufficient_replicas: return "insufficient_replicas";
    }
    return "unknown";
}

void validate_voters(std::span<const VoterProfile> voters) {
    for (std::size_t i = 0; i < voters.size(); ++i) {
        require(voters[i].id == i, ErrorKind::validation,
                "voter ids must be contiguous in [0, N); found " + std::to_string(voters[i].id) +
                    " at position " + std::to_string(i));
        require(voters[i].stake >= 1, ErrorKind::validation,
                "voter " + std::to_string(i) + " has stake < 1");
    }
}

void validate_candidates(std::span<const CandidateProfile> candidates) {
    std::vector<std::uint8_t> seen(candidates.size(), 0);
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        const auto& c = candidates[j];
        require(c.id == j, ErrorKind::validation, "candidate ids must be contiguous");
        require(c.true_unavailability >= 0.0 && c.true_unavailability <= 1.0,
                ErrorKind::validation,
                "candidate " + std::to_string(j) + " true_unavailability outside [0,1]");
        require(c.capability_rank >= 1 &&
                    static_cast<std::size_t>(c.capability_rank) <= candidates.size() &&
                    !seen[c.capability_rank - 1],
                ErrorKind::validation, "capability ranks must be a permutation of 1..M");
        seen[c.capability_rank - 1] = 1;
    }
}

HistoryLedger::HistoryLedger(std::size_t voters, std::size_t candidates, std::size_t k)
    : voters_(voters), candidates_(candidates), k_(k),
      co_choice_(voters * voters * candidates, 0),
      chosen_and_elected_(voters, candidates, 0) {
    require(voters >= 1 && candidates >= 1, ErrorKind::configuration,
            "ledger needs at least one voter and one candidate");
    require(k >= 1 && k <= candidates, ErrorKind::configuration,
            "k_supernodes exceeds num_candidates");
}

void HistoryLedger::append_round(const RoundOutcome& outcome, const ChoiceMatrix& choices,
                                 const Grid<double>& merits) {
    const RoundIndex expected = rounds_completed() + 1;
    if (outcome.round != expected) {
        fail(ErrorKind::sequencing, "round " + std::to_string(outcome.round) +
                                        " does not follow round " +
                                        std::to_string(rounds_completed()));
    }

    auto invalid = [](const std::string& what) { fail(ErrorKind::validation, what); };

    if (choices.rows() != voters_ || choices.cols() != candidates_)
        invalid("choice matrix does not cover every (voter, candidate) pair");
    if (merits.rows() != voters_ || merits.cols() != candidates_)
        invalid("merit matrix does not cover every (voter, candidate) pair");
    if (outcome.profits.rows() != voters_ || outcome.profits.cols() != candidates_)
        invalid("profit matrix does not cover every (voter, candidate) pair");
    if (outcome.scores.size() != candidates_ || outcome.unavailable.size() != candidates_)
        invalid("per-candidate vectors have the wrong length");
    if (outcome.rewards.size() != voters_) invalid("reward vector has the wrong length");

    for (VoterId i = 0; i < voters_; ++i) {
        std::size_t picked = 0;
        for (CandidateId j = 0; j < candidates_; ++j) {
            const auto c = choices(i, j);
            if (c > 1) invalid("choices must be 0 or 1");
            picked += c;
        }
        if (picked != k_) {
            invalid("voter " + std::to_string(i) + " chose " + std::to_string(picked) +
                    " candidates; every voter must choose exactly K=" + std::to_string(k_));
        }
    }

    std::vector<std::uint8_t> elected(candidates_, 0);
    if (outcome.elected_set.size() != k_) {
        invalid("elected set has " + std::to_string(outcome.elected_set.size()) +
                " candidates; exactly K=" + std::to_string(k_) + " required");
    }
    for (auto j : outcome.elected_set) {
        if (j >= candidates_) invalid("elected candidate id out of range");
        if (elected[j]) invalid("elected set contains a duplicate candidate");
        elected[j] = 1;
    }

    for (CandidateId j = 0; j < candidates_; ++j) {
        if (outcome.unavailable[j] > 1) invalid("unavailable flags must be 0 or 1");
        if (outcome.unavailable[j] && !elected[j])
            invalid("candidate " + std::to_string(j) + " marked unavailable but not elected");
    }

    for (VoterId i = 0; i < voters_; ++i) {
        double row_sum = 0.0;
        for (CandidateId j = 0; j < candidates_; ++j) {
            const double m = merits(i, j);
            const double p = outcome.profits(i, j);
            if (!(m >= 0.0) || !std::isfinite(m)) invalid("merits must be finite and nonnegative");
            if (!(p >= 0.0) || !std::isfinite(p)) invalid("profits must be finite and nonnegative");
            if (p > 0.0 && (!elected[j] || outcome.unavailable[j]))
                invalid("profit recorded for a candidate that produced no block");
            row_sum += p;
        }
        if (std::abs(row_sum - outcome.rewards[i]) > 1e-9 * std::max(1.0, row_sum))
            invalid("voter " + std::to_string(i) + " reward does not match the profit split");
    }

    RoundRecord rec;
    rec.choices = choices;
    rec.merits = merits;
    rec.profits = outcome.profits;
    rec.elected = elected;
    rec.unavailable = outcome.unavailable;
    if (rounds_.empty()) {
        rec.merit_total = Grid<double>(voters_, candidates_, 0.0);
        rec.choice_total = Grid<std::uint32_t>(voters_, candidates_, 0);
        rec.elected_total.assign(candidates_, 0);
        rec.unavailable_total.assign(candidates_, 0);
    } else {
        const auto& prev = rounds_.back();
        rec.merit_total = prev.merit_total;
        rec.choice_total = prev.choice_total;
        rec.elected_total = prev.elected_total;
        rec.unavailable_total = prev.unavailable_total;
    }
    for (VoterId i = 0; i < voters_; ++i) {
        for (CandidateId j = 0; j < candidates_; ++j) {
            rec.merit_total(i, j) += merits(i, j);
            rec.choice_total(i, j) += choices(i, j);
        }
    }
    for (CandidateId j = 0; j < candidates_; ++j) {
        rec.elected_total[j] += elected[j];
        rec.unavailable_total[j] += outcome.unavailable[j];
    }

    // Nothing below can throw except allocation; commit.
    auto co = co_choice_;
    auto ce = chosen_and_elected_;
    for (VoterId i = 0; i < voters_; ++i) {
        for (CandidateId j = 0; j < candidates_; ++j) {
            if (!choices(i, j)) continue;
            ce(i, j) += elected[j];
            for (VoterId r = 0; r < voters_; ++r) {
                co[(i * voters_ + r) * candidates_ + j] += choices(r, j);
            }
        }
    }
    rounds_.push_back(std::move(rec));
    co_choice_ = std::move(co);
    chosen_and_elected_ = std::move(ce);
}

void HistoryLedger::check_round(RoundIndex round, RoundIndex through) const {
    if (round < 1 || round > through) {
        fail(ErrorKind::out_of_range, "round " + std::to_string(round) +
                                          " outside recorded history 1.." +
                                          std::to_string(through));
    }
}

void HistoryLedger::check_pair(VoterId i, CandidateId j) const {
    if (i >= voters_ || j >= candidates_)
        fail(ErrorKind::out_of_range, "voter or candidate id out of range");
}

bool HistoryLedger::choice(VoterId i, CandidateId j, RoundIndex round) const {
    check_pair(i, j);
    check_round(round, rounds_completed());
    return rounds_[round - 1].choices(i, j) != 0;
}

double HistoryLedger::merit(VoterId i, CandidateId j, RoundIndex round) const {
    check_pair(i, j);
    check_round(round, rounds_completed());
    return rounds_[round - 1].merits(i, j);
}

double HistoryLedger::profit(VoterId i, CandidateId j, RoundIndex round) const {
    check_pair(i, j);
    check_round(round, rounds_completed());
    return rounds_[round - 1].profits(i, j);
}

bool HistoryLedger::elected(CandidateId j, RoundIndex round) const {
    check_pair(0, j);
    check_round(round, rounds_completed());
    return rounds_[round - 1].elected[j] != 0;
}

bool HistoryLedger::unavailable(CandidateId j, RoundIndex round) const {
    check_pair(0, j);
    check_round(round, rounds_completed());
    return rounds_[round - 1].unavailable[j] != 0;
}

Cumulative HistoryLedger::cumulative(VoterId i, CandidateId j, RoundIndex through_round) const {
    check_pair(i, j);
    if (through_round > rounds_completed()) {
        fail(ErrorKind::out_of_range, "through_round " + std::to_string(through_round) +
                                          " beyond history of " +
                                          std::to_string(rounds_completed()) + " rounds");
    }
    if (through_round == 0) return {};
    const auto& rec = rounds_[through_round - 1];
    return {rec.merit_total(i, j), rec.choice_total(i, j)};
}

std::uint32_t HistoryLedger::times_elected(CandidateId j, RoundIndex through_round) const {
    check_pair(0, j);
    if (through_round > rounds_completed()) fail(ErrorKind::out_of_range, "through_round beyond history");
    return through_round == 0 ? 0 : rounds_[through_round - 1].elected_total[j];
}

std::uint32_t HistoryLedger::times_unavailable(CandidateId j, RoundIndex through_round) const {
    check_pair(0, j);
    if (through_round > rounds_completed()) fail(ErrorKind::out_of_range, "through_round beyond history");
    return through_round == 0 ? 0 : rounds_[through_round - 1].unavailable_total[j];
}

PairCounts HistoryLedger::pair_counts(VoterId i, VoterId r, CandidateId j,
                                      RoundIndex through_round) const {
    check_pair(i, j);
    check_pair(r, j);
    if (through_round > rounds_completed()) fail(ErrorKind::out_of_range, "through_round beyond history");

    PairCounts pc;
    pc.rounds = static_cast<std::uint32_t>(through_round);
    if (through_round == 0) return pc;

    const auto& last = rounds_[through_round - 1];
    pc.self_chosen = last.choice_total(i, j);
    pc.peer_chosen = last.choice_total(r, j);
    pc.elected = last.elected_total[j];

    if (through_round == rounds_completed()) {
        pc.both_chosen = co_choice_[(i * voters_ + r) * candidates_ + j];
        pc.self_and_elected = chosen_and_elected_(i, j);
        pc.peer_and_elected = chosen_and_elected_(r, j);
        return pc;
    }
    for (RoundIndex v = 0; v < through_round; ++v) {
        const auto& rec = rounds_[v];
        const bool ci = rec.choices(i, j) != 0;
        const bool cr = rec.choices(r, j) != 0;
        const bool e = rec.elected[j] != 0;
        pc.both_chosen += ci && cr;
        pc.self_and_elected += ci && e;
        pc.peer_and_elected += cr && e;
    }
    return pc;
}

} // namespace vcsim

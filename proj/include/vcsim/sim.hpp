// Scenario engine: runs the per-round protocol (beliefs, pressure, choice,
// adversary, trust, election, rewards) over a shared ledger.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcsim/core.hpp"
#include "vcsim/election.hpp"
#include "vcsim/selection.hpp"
#include "vcsim/trust.hpp"

namespace vcsim {

enum class BriberyMode {
    override_choice, // bribed voters swap in the briber
    inflate_belief,  // override_choice, plus beliefs claiming the peer backs the briber
};

std::string_view to_string(BriberyMode mode);
BriberyMode parse_bribery_mode(std::string_view name);

struct AdversarySpec {
    std::vector<CandidateId> briber_candidates;
    std::vector<VoterId> bribed_voters;
    std::size_t bribe_top_stake = 0; // also bribe this many highest-stake voters
    BriberyMode mode = BriberyMode::override_choice;
    RoundIndex from_round = 1; // bribery is active from this round on
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::size_t num_voters = 20;
    std::size_t num_candidates = 50;
    std::size_t k_supernodes = 5;
    std::size_t rounds = 100;
    double alpha = 0.5;
    double rho = 5.0;
    AvailabilityFn availability_fn = AvailabilityFn::linear;
    ScoreForm score_form = ScoreForm::logarithmic;
    double clip_delta = kDefaultClipDelta;
    double block_reward = kDefaultBlockReward;
    std::vector<int> stake_choices{1, 2, 3, 4};
    std::vector<int> stakes;                     // explicit per-voter stakes
    std::vector<CandidateId> capability_order;   // most capable first; empty = id order
    double unavailability_step = 0.02;           // rank r gets u = step * r
    bool trust_enabled = true;
    std::optional<AdversarySpec> adversary;
    std::uint64_t seed = 1;
    // Soft thresholds for the availability-function comparison.
    double insensitivity_agreement = 0.90;
    double insensitivity_reward_tolerance = 0.15;

    void validate() const;
};

struct RankingRow {
    std::size_t position = 0;     // 1..K
    CandidateId by_capability = 0;
    CandidateId elected = 0;      // final-round elected set in score order
};

struct ExperimentResult {
    ScenarioConfig config;
    std::vector<VoterProfile> voters;
    std::vector<CandidateProfile> candidates;
    std::vector<RoundOutcome> rounds;
    Grid<double> cumulative_rewards;          // [round - 1][voter]
    std::vector<std::uint32_t> election_counts;
    std::vector<RankingRow> ranking_table;
    std::vector<std::string> warnings;

    std::vector<CandidateId> final_elected() const;
};

std::vector<VoterProfile> make_voters(const ScenarioConfig& config);
std::vector<CandidateProfile> make_candidates(const ScenarioConfig& config);

/// Candidates ordered from most to least capable: ascending true
/// unavailability, then descending mining success (blocks produced per
/// election), then id.
std::vector<CandidateId> capability_ranking(std::span<const CandidateProfile> candidates,
                                            const HistoryLedger* history = nullptr);

/// Explicit bribed voters plus the bribe_top_stake highest-stake voters (ties by id),
/// sorted and deduplicated.
std::vector<VoterId> resolve_bribed(const AdversarySpec& spec,
                                    std::span<const VoterProfile> voters);

/// Bribed voters drop their lowest-pressure chosen candidate for each briber
/// they do not already support. Every voter keeps exactly K choices.
ChoiceMatrix apply_bribery(const ChoiceMatrix& choices, const PressureTable& pressure,
                           const AdversarySpec& spec);

class Simulation {
public:
    explicit Simulation(ScenarioConfig config);

    /// Runs round k = rounds_completed + 1. Atomic: on error the ledger is
    /// unchanged.
    RoundOutcome run_round(RoundIndex k);

    const ScenarioConfig& config() const noexcept { return config_; }
    const HistoryLedger& ledger() const noexcept { return ledger_; }
    const std::vector<VoterProfile>& voters() const noexcept { return voters_; }
    const std::vector<CandidateProfile>& candidates() const noexcept { return candidates_; }
    std::span<const int> stakes() const noexcept { return stakes_; }

private:
    bool bribery_active(RoundIndex k) const;

    ScenarioConfig config_;
    std::vector<VoterProfile> voters_;
    std::vector<CandidateProfile> candidates_;
    std::vector<int> stakes_;
    std::vector<std::uint8_t> bribed_;
    std::vector<std::uint8_t> briber_;
    HistoryLedger ledger_;
    MeritParams merit_params_;
    TrustParams trust_params_;
};

/// Stability warnings for rho, using the least available candidate.
std::vector<std::string> stability_warnings(const ScenarioConfig& config,
                                            std::span<const CandidateProfile> candidates);

ExperimentResult run_experiment(const ScenarioConfig& config);

/// The same scenario run with and without trust evaluation.
struct BriberyComparison {
    std::vector<CandidateId> capability;     // top-K by capability
    std::vector<CandidateId> without_trust;  // final-round elected set, score order
    std::vector<CandidateId> with_trust;
    std::vector<double> scores_without;      // final-round S_j, t = 1
    std::vector<double> scores_with;
    std::vector<CandidateId> bribers;
};

BriberyComparison compare_bribery(const ScenarioConfig& config);

/// The same scenario under each availability function.
struct AvailabilityComparison {
    std::vector<ExperimentResult> runs;  // power, exponential, linear
    double min_agreement = 1.0;          // worst pairwise share of rounds with equal elected sets
    double max_relative_reward_gap = 0.0; // worst pairwise gap of per-stake mean final reward
    double max_relative_total_gap = 0.0;  // same for the total over all voters
    bool passes(const ScenarioConfig& config) const;
};

AvailabilityComparison compare_availability(const ScenarioConfig& config);

/// Stake monotonicity of rewards. Per round: a voter whose choices and trust
/// on chosen candidates match a higher-stake voter's must not earn more.
/// Across the run: mean final cumulative reward per stake level must not
/// decrease with stake.
struct StakeMonotonicity {
    std::size_t violations = 0;
    std::size_t compared_pairs = 0;
    std::map<int, double> mean_final_by_stake;
    bool means_monotone = true;
};

StakeMonotonicity stake_monotonicity(const ExperimentResult& result);

} // namespace vcsim

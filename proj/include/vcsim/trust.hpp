// Peer-prediction trustworthiness: belief formation, proper scoring, beta
// centering and a numeric incentive-compatibility check.

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "vcsim/core.hpp"

namespace vcsim {

inline constexpr double kDefaultClipDelta = 1e-6;

enum class ScoreForm { logarithmic, quadratic };

std::string_view to_string(ScoreForm form);
ScoreForm parse_score_form(std::string_view name);

struct TrustParams {
    double alpha = 0.5;
    ScoreForm form = ScoreForm::logarithmic;
    double clip_delta = kDefaultClipDelta;

    void validate() const;
};

struct BeliefReport {
    VoterId reporter = 0;
    VoterId peer = 1;
    CandidateId candidate = 0;
    RoundIndex round = 1;
    double prior = 0.5;
    double posterior = 0.5;
};

// Voter i's forecast of whether j is elected, given her own choice.
struct ElectionPrediction {
    double elected = 0.5;
    double not_elected = 0.5;
};

double clip_belief(double y, double delta = kDefaultClipDelta);

double cold_start_belief();

/// Prior belief that peer r votes for j in round k >= 2:
///   P(c_r=1 | c_i=1) * self_prob + P(c_r=1 | c_i=0) * (1 - self_prob)
/// with add-one smoothed conditionals over rounds 1..k-1.
double prior_belief(const HistoryLedger& ledger, VoterId i, VoterId r, CandidateId j,
                    RoundIndex k, double self_prob, double delta = kDefaultClipDelta);

/// Smoothed frequency of j being elected in past rounds where voter i made
/// the same choice as own_choice.
ElectionPrediction predict_election(const HistoryLedger& ledger, VoterId i, CandidateId j,
                                    RoundIndex k, bool own_choice);

/// Posterior belief that peer r votes for j in round k >= 2:
///   P(c_r=1 | V_j=h) * P(e=1|c) + P(c_r=1 | V_j=l) * P(e=0|c)
double posterior_belief(const HistoryLedger& ledger, VoterId i, VoterId r, CandidateId j,
                        RoundIndex k, bool own_choice, ElectionPrediction prediction,
                        double delta = kDefaultClipDelta);

/// W(y, c). y must lie in [delta, 1 - delta].
double score_w(double y, bool c, ScoreForm form, double delta = kDefaultClipDelta);

// Prior and posterior raw score against the peer's realized choice.
double raw_score(double prior, double posterior, bool peer_choice, const TrustParams& params);

struct ReportPair {
    double prior = 0.5;
    double posterior = 0.5;
};

/// beta = -(1/N) * sum of raw scores, one report per voter.
double beta(std::span<const ReportPair> reports, std::span<const std::uint8_t> peer_choices,
            const TrustParams& params);

/// t = raw score + beta.
double trustworthiness(const BeliefReport& report, bool peer_choice, double beta_value,
                       const TrustParams& params);

/// Each voter's peer for one round; peer[i] != i.
std::vector<VoterId> assign_peers(std::size_t voters, RoundIndex round, std::uint64_t seed);

struct IcResult {
    double argmax_prior = 0.0;
    double argmax_posterior = 0.0;
    double best_expected = 0.0;
};

/// Expected raw score when the peer votes with probability p1 (scored
/// against the prior) and p2 (scored against the posterior).
double expected_score(double y_prior, double y_posterior, double p1, double p2, double alpha,
                      ScoreForm form);

/// Exhaustive search over reported (prior, posterior) on the grid
/// {step, 2 step, ..., 1 - step}. Ties keep the first grid point.
IcResult ic_check(double p1, double p2, double alpha, ScoreForm form, double grid_step);

} // namespace vcsim

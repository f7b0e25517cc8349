#include "vcsim/trust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vcsim/rng.hpp"

namespace vcsim {

namespace {

double smoothed(std::uint32_t hits, std::uint32_t trials) {
    return (static_cast<double>(hits) + 1.0) / (static_cast<double>(trials) + 2.0);
}

void check_history_round(const HistoryLedger& ledger, RoundIndex k) {
    require(k >= 2, ErrorKind::out_of_range, "history-based beliefs start at round 2");
    require(k - 1 <= ledger.rounds_completed(), ErrorKind::out_of_range,
            "belief round " + std::to_string(k) + " needs rounds 1.." + std::to_string(k - 1));
}

} // namespace

std::string_view to_string(ScoreForm form) {
    return form == ScoreForm::logarithmic ? "logarithmic" : "quadratic";
}

ScoreForm parse_score_form(std::string_view name) {
    if (name == "logarithmic" || name == "log") return ScoreForm::logarithmic;
    if (name == "quadratic") return ScoreForm::quadratic;
    fail(ErrorKind::configuration,
         "unknown score form '" + std::string(name) + "' (expected logarithmic or quadratic)");
}

void TrustParams::validate() const {
    require(alpha >= 0.0 && alpha <= 1.0, ErrorKind::configuration, "alpha must lie in [0,1]");
    require(clip_delta > 0.0 && clip_delta <= 0.01, ErrorKind::configuration,
            "clip_delta must lie in (0, 0.01]");
}

double clip_belief(double y, double delta) { return std::clamp(y, delta, 1.0 - delta); }

double cold_start_belief() { return 0.5; }

double prior_belief(const HistoryLedger& ledger, VoterId i, VoterId r, CandidateId j,
                    RoundIndex k, double self_prob, double delta) {
    check_history_round(ledger, k);
    require(i != r, ErrorKind::validation, "peer must differ from reporter");
    require(self_prob >= 0.0 && self_prob <= 1.0, ErrorKind::domain,
            "self_prob must lie in [0,1]");
    const auto pc = ledger.pair_counts(i, r, j, k - 1);
    const double given_chosen = smoothed(pc.both_chosen, pc.self_chosen);
    const double given_not = smoothed(pc.peer_chosen - pc.both_chosen, pc.rounds - pc.self_chosen);
    return clip_belief(given_chosen * self_prob + given_not * (1.0 - self_prob), delta);
}

ElectionPrediction predict_election(const HistoryLedger& ledger, VoterId i, CandidateId j,
                                    RoundIndex k, bool own_choice) {
    require(k >= 1 && k - 1 <= ledger.rounds_completed(), ErrorKind::out_of_range,
            "prediction round outside history");
    if (k == 1) return {};
    const auto pc = ledger.pair_counts(i, i, j, k - 1);
    const double p = own_choice
                         ? smoothed(pc.self_and_elected, pc.self_chosen)
                         : smoothed(pc.elected - pc.self_and_elected, pc.rounds - pc.self_chosen);
    return {p, 1.0 - p};
}

double posterior_belief(const HistoryLedger& ledger, VoterId i, VoterId r, CandidateId j,
                        RoundIndex k, bool own_choice, ElectionPrediction prediction,
                        double delta) {
    (void)own_choice; // the prediction already conditions on it
    check_history_round(ledger, k);
    require(i != r, ErrorKind::validation, "peer must differ from reporter");
    require(prediction.elected >= 0.0 && prediction.not_elected >= 0.0 &&
                std::abs(prediction.elected + prediction.not_elected - 1.0) <= 1e-9,
            ErrorKind::validation, "election prediction must be a distribution");
    const auto pc = ledger.pair_counts(i, r, j, k - 1);
    const double given_high = smoothed(pc.peer_and_elected, pc.elected);
    const double given_low = smoothed(pc.peer_chosen - pc.peer_and_elected, pc.rounds - pc.elected);
    return clip_belief(given_high * prediction.elected + given_low * prediction.not_elected, delta);
}

double score_w(double y, bool c, ScoreForm form, double delta) {
    // Small slack so values produced by clip_belief round-trip.
    const double slack = 1e-15;
    require(y >= delta - slack && y <= 1.0 - delta + slack, ErrorKind::domain,
            "belief " + std::to_string(y) + " outside the clipped range");
    if (form == ScoreForm::logarithmic) return c ? std::log(y) : std::log1p(-y);
    return c ? 2.0 * y - y * y : 1.0 - y * y;
}

double raw_score(double prior, double posterior, bool peer_choice, const TrustParams& params) {
    return params.alpha * score_w(prior, peer_choice, params.form, params.clip_delta) +
           (1.0 - params.alpha) * score_w(posterior, peer_choice, params.form, params.clip_delta);
}

double beta(std::span<const ReportPair> reports, std::span<const std::uint8_t> peer_choices,
            const TrustParams& params) {
    require(!reports.empty(), ErrorKind::validation, "beta needs at least one report");
    require(reports.size() == peer_choices.size(), ErrorKind::validation,
            "one peer outcome is required per report");
    // Mean taken around the first score so identical scores center to exactly 0.
    const double pivot = raw_score(reports[0].prior, reports[0].posterior, peer_choices[0] != 0, params);
    double sum = 0.0;
    for (std::size_t i = 1; i < reports.size(); ++i)
        sum += raw_score(reports[i].prior, reports[i].posterior, peer_choices[i] != 0, params) - pivot;
    return -(pivot + sum / static_cast<double>(reports.size()));
}

double trustworthiness(const BeliefReport& report, bool peer_choice, double beta_value,
                       const TrustParams& params) {
    return raw_score(report.prior, report.posterior, peer_choice, params) + beta_value;
}

std::vector<VoterId> assign_peers(std::size_t voters, RoundIndex round, std::uint64_t seed) {
    require(voters >= 2, ErrorKind::configuration, "peer assignment needs at least two voters");
    std::vector<VoterId> peer(voters);
    for (VoterId i = 0; i < voters; ++i) {
        auto eng = make_stream(seed, "peer", round, i);
        // Draw from the N-1 other voters.
        const auto draw = static_cast<VoterId>(uniform_below(eng, voters - 1));
        peer[i] = draw >= i ? draw + 1 : draw;
    }
    return peer;
}

double expected_score(double y_prior, double y_posterior, double p1, double p2, double alpha,
                      ScoreForm form) {
    auto w = [form](double y, bool c) { return score_w(y, c, form, 0.0); };
    return alpha * (p1 * w(y_prior, true) + (1.0 - p1) * w(y_prior, false)) +
           (1.0 - alpha) * (p2 * w(y_posterior, true) + (1.0 - p2) * w(y_posterior, false));
}

IcResult ic_check(double p1, double p2, double alpha, ScoreForm form, double grid_step) {
    require(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0, ErrorKind::domain,
            "p1 and p2 must lie in (0,1)");
    require(alpha >= 0.0 && alpha <= 1.0, ErrorKind::domain, "alpha must lie in [0,1]");
    require(grid_step > 0.0 && grid_step <= 0.01 + 1e-12, ErrorKind::configuration,
            "grid step must be at most 0.01");

    const auto points = static_cast<std::size_t>(std::llround(1.0 / grid_step)) - 1;
    IcResult best{0.0, 0.0, -std::numeric_limits<double>::infinity()};
    for (std::size_t a = 1; a <= points; ++a) {
        const double y = static_cast<double>(a) * grid_step;
        for (std::size_t b = 1; b <= points; ++b) {
            const double yp = static_cast<double>(b) * grid_step;
            const double e = expected_score(y, yp, p1, p2, alpha, form);
            if (e > best.best_expected) best = {y, yp, e};
        }
    }
    return best;
}

} // namespace vcsim

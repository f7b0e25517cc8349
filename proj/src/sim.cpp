#include "vcsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "vcsim/rng.hpp"

namespace vcsim {

std::string_view to_string(BriberyMode mode) {
    return mode == BriberyMode::override_choice ? "override_choice" : "inflate_belief";
}

BriberyMode parse_bribery_mode(std::string_view name) {
    if (name == "override_choice") return BriberyMode::override_choice;
    if (name == "inflate_belief") return BriberyMode::inflate_belief;
    fail(ErrorKind::configuration, "unknown adversary mode '" + std::string(name) + "'");
}

void ScenarioConfig::validate() const {
    auto bad = [](const std::string& what) { fail(ErrorKind::configuration, what); };
    if (num_candidates < 1) bad("num_candidates must be at least 1");
    if (k_supernodes < 1) bad("k_supernodes must be at least 1");
    if (k_supernodes > num_candidates) bad("k_supernodes exceeds num_candidates");
    if (num_voters < 2) bad("num_voters must be at least 2");
    if (!(block_reward > 0.0)) bad("block_reward must be positive");
    if (!(rho > 0.0)) bad("rho must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0)) bad("alpha must lie in [0,1]");
    if (!(clip_delta > 0.0 && clip_delta <= 0.01)) bad("clip_delta must lie in (0, 0.01]");
    if (!(unavailability_step >= 0.0) ||
        unavailability_step * static_cast<double>(num_candidates) > 1.0 + 1e-12)
        bad("unavailability_step * num_candidates must not exceed 1");
    if (stakes.empty()) {
        if (stake_choices.empty()) bad("stake_choices must not be empty");
        for (int s : stake_choices)
            if (s < 1) bad("stake_choices must be positive");
    } else {
        if (stakes.size() != num_voters) bad("stakes must list one stake per voter");
        for (int s : stakes)
            if (s < 1) bad("stakes must be positive");
    }
    if (!capability_order.empty()) {
        if (capability_order.size() != num_candidates)
            bad("capability_order must list every candidate");
        std::vector<std::uint8_t> seen(num_candidates, 0);
        for (auto j : capability_order) {
            if (j >= num_candidates || seen[j]) bad("capability_order must be a permutation");
            seen[j] = 1;
        }
    }
    if (adversary) {
        for (auto j : adversary->briber_candidates)
            if (j >= num_candidates) bad("briber candidate id out of range");
        for (auto i : adversary->bribed_voters)
            if (i >= num_voters) bad("bribed voter id out of range");
        if (adversary->bribe_top_stake > num_voters) bad("bribe_top_stake exceeds num_voters");
        if (adversary->briber_candidates.size() > k_supernodes)
            bad("more briber candidates than super-node slots");
        if (adversary->from_round < 1) bad("adversary from_round must be at least 1");
    }
}

std::vector<CandidateId> ExperimentResult::final_elected() const {
    if (rounds.empty()) return {};
    return rounds.back().elected_set;
}

std::vector<VoterProfile> make_voters(const ScenarioConfig& config) {
    std::vector<VoterProfile> voters(config.num_voters);
    for (VoterId i = 0; i < config.num_voters; ++i) {
        voters[i].id = i;
        if (!config.stakes.empty()) {
            voters[i].stake = config.stakes[i];
        } else {
            auto eng = make_stream(config.seed, "stake", i);
            voters[i].stake = config.stake_choices[uniform_below(eng, config.stake_choices.size())];
        }
    }
    return voters;
}

std::vector<CandidateProfile> make_candidates(const ScenarioConfig& config) {
    std::vector<CandidateId> order = config.capability_order;
    if (order.empty()) {
        order.resize(config.num_candidates);
        std::iota(order.begin(), order.end(), CandidateId{0});
    }
    std::vector<CandidateProfile> out(config.num_candidates);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const auto j = order[pos];
        const int rank = static_cast<int>(pos) + 1;
        out[j].id = j;
        out[j].capability_rank = rank;
        out[j].true_unavailability =
            std::min(1.0, config.unavailability_step * static_cast<double>(rank));
    }
    return out;
}

std::vector<CandidateId> capability_ranking(std::span<const CandidateProfile> candidates,
                                            const HistoryLedger* history) {
    std::vector<double> success(candidates.size(), 0.0);
    if (history && history->rounds_completed() > 0) {
        const auto t = history->rounds_completed();
        for (CandidateId j = 0; j < candidates.size(); ++j) {
            const auto e = history->times_elected(j, t);
            if (e > 0)
                success[j] = static_cast<double>(e - history->times_unavailable(j, t)) /
                             static_cast<double>(e);
        }
    }
    std::vector<CandidateId> ids(candidates.size());
    std::iota(ids.begin(), ids.end(), CandidateId{0});
    std::stable_sort(ids.begin(), ids.end(), [&](CandidateId a, CandidateId b) {
        const double ua = candidates[a].true_unavailability;
        const double ub = candidates[b].true_unavailability;
        if (ua != ub) return ua < ub;
        if (success[a] != success[b]) return success[a] > success[b];
        return a < b;
    });
    return ids;
}

std::vector<VoterId> resolve_bribed(const AdversarySpec& spec,
                                    std::span<const VoterProfile> voters) {
    std::vector<VoterId> out = spec.bribed_voters;
    std::vector<VoterId> order(voters.size());
    std::iota(order.begin(), order.end(), VoterId{0});
    std::stable_sort(order.begin(), order.end(), [&](VoterId a, VoterId b) {
        return voters[a].stake > voters[b].stake;
    });
    const auto n = std::min(spec.bribe_top_stake, order.size());
    out.insert(out.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ChoiceMatrix apply_bribery(const ChoiceMatrix& choices, const PressureTable& pressure,
                           const AdversarySpec& spec) {
    ChoiceMatrix out = choices;
    std::vector<std::uint8_t> is_briber(choices.cols(), 0);
    for (auto j : spec.briber_candidates) is_briber.at(j) = 1;

    for (auto i : spec.bribed_voters) {
        for (auto briber : spec.briber_candidates) {
            if (out(i, briber)) continue;
            // Lowest pressure among chosen non-briber candidates; ties drop the larger id.
            std::optional<CandidateId> drop;
            for (CandidateId j = 0; j < out.cols(); ++j) {
                if (!out(i, j) || is_briber[j]) continue;
                if (!drop || pressure.values(i, j) <= pressure.values(i, *drop)) drop = j;
            }
            if (!drop) break;
            out(i, *drop) = 0;
            out(i, briber) = 1;
        }
    }
    return out;
}

Simulation::Simulation(ScenarioConfig config)
    : config_((config.validate(), std::move(config))),
      voters_(make_voters(config_)),
      candidates_(make_candidates(config_)),
      bribed_(config_.num_voters, 0),
      briber_(config_.num_candidates, 0),
      ledger_(config_.num_voters, config_.num_candidates, config_.k_supernodes),
      merit_params_{config_.rho, config_.availability_fn, config_.block_reward},
      trust_params_{config_.alpha, config_.score_form, config_.clip_delta} {
    stakes_.reserve(voters_.size());
    for (const auto& v : voters_) stakes_.push_back(v.stake);
    if (config_.adversary) {
        config_.adversary->bribed_voters = resolve_bribed(*config_.adversary, voters_);
        config_.adversary->bribe_top_stake = 0;
        for (auto i : config_.adversary->bribed_voters) bribed_[i] = 1;
        for (auto j : config_.adversary->briber_candidates) briber_[j] = 1;
    }
}

bool Simulation::bribery_active(RoundIndex k) const {
    return config_.adversary && k >= config_.adversary->from_round;
}

RoundOutcome Simulation::run_round(RoundIndex k) {
    require(k == ledger_.rounds_completed() + 1, ErrorKind::sequencing,
            "round " + std::to_string(k) + " does not follow round " +
                std::to_string(ledger_.rounds_completed()));

    const std::size_t n = config_.num_voters;
    const std::size_t m = config_.num_candidates;
    const std::size_t kk = config_.k_supernodes;
    const double delta = config_.clip_delta;
    const auto peers = assign_peers(n, k, config_.seed);

    // Pressure and each voter's honest top-K.
    const auto pressure = pressure_table(ledger_, k);
    ChoiceMatrix honest(n, m, 0);
    for (VoterId i = 0; i < n; ++i)
        for (auto j : choose_topk(pressure.values.row(i), kk)) honest(i, j) = 1;

    // Prior beliefs, formed from the voter's own pressure ranking.
    Grid<double> prior(n, m, cold_start_belief());
    if (k > 1) {
        for (VoterId i = 0; i < n; ++i) {
            for (CandidateId j = 0; j < m; ++j) {
                const double self_prob = honest(i, j) ? 1.0 - delta : delta;
                prior(i, j) = prior_belief(ledger_, i, peers[i], j, k, self_prob, delta);
            }
        }
    }

    ChoiceMatrix choices = honest;
    const bool bribed_round = bribery_active(k);
    if (bribed_round) choices = apply_bribery(honest, pressure, *config_.adversary);

    Grid<double> posterior(n, m, cold_start_belief());
    if (k > 1) {
        for (VoterId i = 0; i < n; ++i) {
            for (CandidateId j = 0; j < m; ++j) {
                const bool own = choices(i, j) != 0;
                const auto pred = predict_election(ledger_, i, j, k, own);
                posterior(i, j) = posterior_belief(ledger_, i, peers[i], j, k, own, pred, delta);
            }
        }
    }
    if (bribed_round && config_.adversary->mode == BriberyMode::inflate_belief) {
        for (VoterId i = 0; i < n; ++i) {
            if (!bribed_[i]) continue;
            for (CandidateId j = 0; j < m; ++j) {
                if (!briber_[j]) continue;
                prior(i, j) = 1.0 - delta;
                posterior(i, j) = 1.0 - delta;
            }
        }
    }

    Grid<double> trust(n, m, 1.0);
    if (config_.trust_enabled) {
        std::vector<ReportPair> reports(n);
        std::vector<std::uint8_t> peer_choice(n);
        for (CandidateId j = 0; j < m; ++j) {
            for (VoterId i = 0; i < n; ++i) {
                reports[i] = {prior(i, j), posterior(i, j)};
                peer_choice[i] = choices(peers[i], j);
            }
            const double b = beta(reports, peer_choice, trust_params_);
            for (VoterId i = 0; i < n; ++i) {
                const BeliefReport rep{i, peers[i], j, k, prior(i, j), posterior(i, j)};
                trust(i, j) = trustworthiness(rep, peer_choice[i] != 0, b, trust_params_);
            }
        }
    }

    const auto board = score_board(k, choices, trust, stakes_);

    RoundOutcome out;
    out.round = k;
    out.scores = board.entries;
    out.elected_set = elect(board, kk);
    out.unavailable.assign(m, 0);
    out.escrowed.assign(m, 0);
    out.profits = Grid<double>(n, m, 0.0);
    out.rewards.assign(n, 0.0);
    out.trust = trust;
    out.choices = choices;

    std::vector<double> weights(n);
    for (auto j : out.elected_set) {
        if (board.entries[j] < 0.0) out.negative_score_elected = true;
        auto eng = make_stream(config_.seed, "unavailable", k, j);
        const bool down = uniform01(eng) < candidates_[j].true_unavailability;
        out.unavailable[j] = down ? 1 : 0;
        for (VoterId i = 0; i < n; ++i)
            weights[i] = static_cast<double>(stakes_[i]) * trust(i, j) * choices(i, j);
        const auto split = distribute_reward(weights, config_.block_reward, !down);
        out.escrowed[j] = split.escrowed ? 1 : 0;
        for (VoterId i = 0; i < n; ++i) out.profits(i, j) = split.shares[i];
    }
    for (VoterId i = 0; i < n; ++i) {
        double sum = 0.0;
        for (CandidateId j = 0; j < m; ++j) sum += out.profits(i, j);
        out.rewards[i] = sum;
    }

    // Merit uses the unavailability estimate this round's pressure was built on.
    Grid<double> merits(n, m, 0.0);
    std::vector<double> u_hat(m);
    for (CandidateId j = 0; j < m; ++j) u_hat[j] = estimate_unavailability(ledger_, j, k - 1);
    for (VoterId i = 0; i < n; ++i)
        for (CandidateId j = 0; j < m; ++j)
            merits(i, j) = merit(u_hat[j], out.profits(i, j), merit_params_);

    ledger_.append_round(out, choices, merits);
    return out;
}

std::vector<std::string> stability_warnings(const ScenarioConfig& config,
                                            std::span<const CandidateProfile> candidates) {
    std::vector<std::string> warnings;
    // Worst case: a candidate selected every round (Lambda = 1) that brings no profit.
    double worst_d = 1.0;
    std::size_t zero_d = 0;
    for (const auto& c : candidates) {
        const double d = availability(config.availability_fn, c.true_unavailability);
        if (d <= 0.0) {
            ++zero_d;
            continue;
        }
        worst_d = std::min(worst_d, d);
    }
    const double bound = min_rho(1.0, 0.0, worst_d);
    if (config.rho <= bound) {
        std::ostringstream os;
        os << "rho=" << config.rho << " is not above the stability bound " << bound
           << " for the least available candidate";
        warnings.push_back(os.str());
    }
    if (zero_d > 0) {
        warnings.push_back(std::to_string(zero_d) +
                           " candidate(s) have d(u)=0; their ranking queue is unstable for any rho");
    }
    return warnings;
}

ExperimentResult run_experiment(const ScenarioConfig& config) {
    Simulation sim(config);

    ExperimentResult res;
    res.config = sim.config();
    res.voters = sim.voters();
    res.candidates = sim.candidates();
    res.warnings = stability_warnings(res.config, res.candidates);
    res.cumulative_rewards = Grid<double>(config.rounds, config.num_voters, 0.0);
    res.election_counts.assign(config.num_candidates, 0);
    res.rounds.reserve(config.rounds);

    std::vector<double> running(config.num_voters, 0.0);
    std::size_t negative_rounds = 0;
    std::size_t escrow_rounds = 0;
    for (RoundIndex k = 1; k <= config.rounds; ++k) {
        auto outcome = sim.run_round(k);
        for (VoterId i = 0; i < config.num_voters; ++i) {
            running[i] += outcome.rewards[i];
            res.cumulative_rewards(k - 1, i) = running[i];
        }
        for (auto j : outcome.elected_set) ++res.election_counts[j];
        if (outcome.negative_score_elected) ++negative_rounds;
        if (std::any_of(outcome.escrowed.begin(), outcome.escrowed.end(),
                        [](std::uint8_t e) { return e != 0; }))
            ++escrow_rounds;
        res.rounds.push_back(std::move(outcome));
    }
    if (negative_rounds > 0)
        res.warnings.push_back(std::to_string(negative_rounds) +
                               " round(s) elected a candidate with a negative score");
    if (escrow_rounds > 0)
        res.warnings.push_back(std::to_string(escrow_rounds) +
                               " round(s) escrowed a block reward (no positive-weight supporter)");

    if (!res.rounds.empty()) {
        const auto by_capability = capability_ranking(res.candidates, &sim.ledger());
        const auto& elected = res.rounds.back().elected_set;
        for (std::size_t pos = 0; pos < elected.size(); ++pos)
            res.ranking_table.push_back({pos + 1, by_capability[pos], elected[pos]});
    }
    return res;
}

BriberyComparison compare_bribery(const ScenarioConfig& config) {
    BriberyComparison out;
    ScenarioConfig c = config;
    c.trust_enabled = false;
    const auto off = run_experiment(c);
    c.trust_enabled = true;
    const auto on = run_experiment(c);

    const auto ranking = capability_ranking(on.candidates);
    out.capability.assign(ranking.begin(),
                          ranking.begin() + static_cast<std::ptrdiff_t>(config.k_supernodes));
    out.without_trust = off.final_elected();
    out.with_trust = on.final_elected();
    if (!off.rounds.empty()) out.scores_without = off.rounds.back().scores;
    if (!on.rounds.empty()) out.scores_with = on.rounds.back().scores;
    if (config.adversary) out.bribers = config.adversary->briber_candidates;
    return out;
}

namespace {

std::map<int, double> mean_final_by_stake(const ExperimentResult& r) {
    std::map<int, std::pair<double, int>> acc;
    if (r.rounds.empty()) return {};
    const auto last = r.rounds.size() - 1;
    for (const auto& v : r.voters) {
        auto& a = acc[v.stake];
        a.first += r.cumulative_rewards(last, v.id);
        a.second += 1;
    }
    std::map<int, double> out;
    for (const auto& [s, a] : acc) out[s] = a.first / a.second;
    return out;
}

} // namespace

bool AvailabilityComparison::passes(const ScenarioConfig& config) const {
    return min_agreement >= config.insensitivity_agreement &&
           max_relative_reward_gap <= config.insensitivity_reward_tolerance;
}

AvailabilityComparison compare_availability(const ScenarioConfig& config) {
    AvailabilityComparison out;
    for (auto fn : {AvailabilityFn::power, AvailabilityFn::exponential, AvailabilityFn::linear}) {
        ScenarioConfig c = config;
        c.availability_fn = fn;
        out.runs.push_back(run_experiment(c));
    }
    const std::size_t t = config.rounds;
    for (std::size_t a = 0; a < out.runs.size(); ++a) {
        for (std::size_t b = a + 1; b < out.runs.size(); ++b) {
            if (t > 0) {
                std::size_t agree = 0;
                for (std::size_t k = 0; k < t; ++k) {
                    auto x = out.runs[a].rounds[k].elected_set;
                    auto y = out.runs[b].rounds[k].elected_set;
                    std::sort(x.begin(), x.end());
                    std::sort(y.begin(), y.end());
                    agree += x == y ? 1 : 0;
                }
                out.min_agreement = std::min(out.min_agreement,
                                             static_cast<double>(agree) / static_cast<double>(t));
            }
            if (t > 0) {
                double ta = 0.0, tb = 0.0;
                for (VoterId i = 0; i < config.num_voters; ++i) {
                    ta += out.runs[a].cumulative_rewards(t - 1, i);
                    tb += out.runs[b].cumulative_rewards(t - 1, i);
                }
                const double scale = std::max(std::abs(ta), std::abs(tb));
                if (scale > 0.0)
                    out.max_relative_total_gap =
                        std::max(out.max_relative_total_gap, std::abs(ta - tb) / scale);
            }
            const auto ma = mean_final_by_stake(out.runs[a]);
            const auto mb = mean_final_by_stake(out.runs[b]);
            for (const auto& [stake, va] : ma) {
                const double vb = mb.at(stake);
                const double scale = std::max(std::abs(va), std::abs(vb));
                if (scale > 0.0)
                    out.max_relative_reward_gap =
                        std::max(out.max_relative_reward_gap, std::abs(va - vb) / scale);
            }
        }
    }
    return out;
}

StakeMonotonicity stake_monotonicity(const ExperimentResult& result) {
    StakeMonotonicity out;
    const std::size_t n = result.voters.size();
    if (result.rounds.empty() || n == 0) return out;

    for (const auto& r : result.rounds) {
        for (VoterId a = 0; a < n; ++a) {
            for (VoterId b = 0; b < n; ++b) {
                if (result.voters[a].stake >= result.voters[b].stake) continue;
                if (!std::equal(r.choices.row(a).begin(), r.choices.row(a).end(),
                                r.choices.row(b).begin()))
                    continue;
                bool same_trust = true;
                for (CandidateId j = 0; j < r.choices.cols() && same_trust; ++j)
                    if (r.choices(a, j) && r.trust(a, j) != r.trust(b, j)) same_trust = false;
                if (!same_trust) continue;
                ++out.compared_pairs;
                if (r.rewards[a] > r.rewards[b]) ++out.violations;
            }
        }
    }

    out.mean_final_by_stake = mean_final_by_stake(result);
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& [stake, mean] : out.mean_final_by_stake) {
        if (mean < prev) out.means_monotone = false;
        prev = mean;
    }
    return out;
}

} // namespace vcsim

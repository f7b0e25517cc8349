#include <algorithm>
#include <cmath>
#include <map>

#include "vcsim/cli.hpp"
#include "vcsim/error.hpp"
#include "vcsim/ldp.hpp"

#ifndef VCSIM_SCENARIO_DIR
#define VCSIM_SCENARIO_DIR "scenarios"
#endif

namespace vcsim::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Rows = std::vector<std::vector<std::string>>;

std::string num(double v) { return format_double(v); }
std::string num(std::size_t v) { return std::to_string(v); }

ScenarioConfig load_scenario(const fs::path& dir, const std::string& name,
                             const std::vector<std::string>& overrides, json& used) {
    json doc = read_config_document(dir / (name + ".json"));
    for (const auto& o : overrides) apply_override(doc, o);
    auto config = config_from_json(doc);
    used = config_to_json(config);
    return config;
}

std::vector<std::string> fig2(const fs::path& out) {
    Rows rows;
    for (int bi = 1; bi <= 20; ++bi) {
        const double b = 0.5 * bi;
        for (int gi = 1; gi <= 30; ++gi) {
            const double gap = 0.1 * gi;
            rows.push_back({num(b), num(gap), num(1.0), num(rate_function(b, 1.0 + gap, 1.0))});
        }
    }
    write_csv(out / "fig2.csv", {"b", "lambda_minus_Lambda", "Lambda", "rate"}, rows);
    return {"fig2.csv"};
}

std::vector<std::string> fig3(const fs::path& out) {
    Rows rows;
    for (double gap : {0.1, 0.25, 0.5, 1.0, 2.0, 4.0}) {
        for (int ei = 1; ei <= 100; ++ei) {
            const double eps = 0.01 * ei;
            rows.push_back({num(eps), num(gap), num(1.0), num(effective_valve(eps, 1.0 + gap, 1.0))});
        }
    }
    write_csv(out / "fig3.csv", {"epsilon", "lambda_minus_Lambda", "Lambda", "effective_valve"}, rows);
    return {"fig3.csv"};
}

std::vector<std::string> fig4(const fs::path& out) {
    const double Lambda = 0.5;
    Rows rows;
    for (int ei = 1; ei <= 20; ++ei) {
        const double eps = 0.05 * ei;
        for (int L = 1; L <= 20; ++L)
            rows.push_back({num(eps), num(static_cast<double>(L)), num(Lambda),
                            num(effective_merit(eps, Lambda, L))});
    }
    write_csv(out / "fig4.csv", {"epsilon", "L", "Lambda", "effective_merit"}, rows);
    return {"fig4.csv"};
}

std::map<int, double> stake_means(const ExperimentResult& r, std::size_t round_index) {
    std::map<int, std::pair<double, int>> acc;
    for (const auto& v : r.voters) {
        acc[v.stake].first += r.cumulative_rewards(round_index, v.id);
        acc[v.stake].second += 1;
    }
    std::map<int, double> out;
    for (const auto& [s, a] : acc) out[s] = a.first / a.second;
    return out;
}

std::vector<std::string> fig5(const ScenarioConfig& base, const fs::path& out,
                              std::vector<std::string>& warnings) {
    Rows rows;
    auto emit = [&](const std::string& variant, const ExperimentResult& r) {
        if (r.rounds.empty()) return;
        const auto last = r.rounds.size() - 1;
        for (const auto& v : r.voters)
            rows.push_back({variant, num(v.id), std::to_string(v.stake),
                            num(r.cumulative_rewards(last, v.id))});
    };
    for (auto fn : {AvailabilityFn::power, AvailabilityFn::exponential, AvailabilityFn::linear}) {
        ScenarioConfig c = base;
        c.availability_fn = fn;
        const auto r = run_experiment(c);
        warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
        emit(std::string(to_string(fn)), r);
    }
    ScenarioConfig flat = base;
    flat.unavailability_step = 0.0;
    emit("no_unavailability", run_experiment(flat));
    write_csv(out / "fig5.csv", {"variant", "voter", "stake", "cumulative_reward"}, rows);

    Rows curves;
    for (int i = 0; i <= 100; ++i) {
        const double u = 0.01 * i;
        curves.push_back({num(u), num(availability(AvailabilityFn::power, u)),
                          num(availability(AvailabilityFn::exponential, u)),
                          num(availability(AvailabilityFn::linear, u))});
    }
    write_csv(out / "fig5_availability.csv", {"u", "power", "exponential", "linear"}, curves);
    return {"fig5.csv", "fig5_availability.csv"};
}

std::vector<std::string> fig7(const ScenarioConfig& config, const fs::path& out,
                              std::vector<std::string>& warnings) {
    const auto r = run_experiment(config);
    warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
    Rows rows;
    for (std::size_t k = 0; k < r.rounds.size(); ++k)
        for (const auto& [stake, mean] : stake_means(r, k))
            rows.push_back({num(k + 1), std::to_string(stake), num(mean)});
    write_csv(out / "fig7.csv", {"round", "stake", "mean_cumulative_reward"}, rows);
    write_simulation(r, out / "fig7_run");
    return {"fig7.csv", "fig7_run/rewards.csv", "fig7_run/elections.csv", "fig7_run/trust.csv"};
}

std::vector<std::string> fig8(const ScenarioConfig& config, const fs::path& out,
                              std::vector<std::string>& warnings) {
    const auto cmp = compare_availability(config);
    Rows rows;
    for (const auto& r : cmp.runs) {
        warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
        const std::string fn(to_string(r.config.availability_fn));
        for (std::size_t k = 0; k < r.rounds.size(); ++k)
            for (const auto& [stake, mean] : stake_means(r, k))
                rows.push_back({fn, num(k + 1), std::to_string(stake), num(mean)});
    }
    write_csv(out / "fig8.csv", {"availability_fn", "round", "stake", "mean_cumulative_reward"},
              rows);
    const bool agree_ok = cmp.min_agreement >= config.insensitivity_agreement;
    const bool gap_ok = cmp.max_relative_reward_gap <= config.insensitivity_reward_tolerance;
    write_csv(out / "fig8_summary.csv", {"metric", "value", "threshold", "within_threshold"},
              {{"min_elected_set_agreement", num(cmp.min_agreement),
                num(config.insensitivity_agreement), agree_ok ? "1" : "0"},
               {"max_relative_reward_gap_by_stake", num(cmp.max_relative_reward_gap),
                num(config.insensitivity_reward_tolerance), gap_ok ? "1" : "0"},
               {"max_relative_total_reward_gap", num(cmp.max_relative_total_gap),
                num(config.insensitivity_reward_tolerance),
                cmp.max_relative_total_gap <= config.insensitivity_reward_tolerance ? "1" : "0"}});
    if (!agree_ok || !gap_ok)
        warnings.push_back("availability functions changed the outcome beyond the soft thresholds");
    return {"fig8.csv", "fig8_summary.csv"};
}

std::vector<std::string> table(const std::string& name, const ScenarioConfig& config,
                               const fs::path& out) {
    const auto cmp = compare_bribery(config);
    const auto candidates = make_candidates(config);
    Rows rows;
    for (std::size_t p = 0; p < config.k_supernodes; ++p)
        rows.push_back({num(p + 1), num(cmp.capability[p]), num(cmp.without_trust[p]),
                        num(cmp.with_trust[p])});
    write_csv(out / (name + ".csv"),
              {"position", "capability_ranking", "without_trust", "with_trust"}, rows);

    auto in = [](const std::vector<CandidateId>& v, CandidateId j) {
        return std::find(v.begin(), v.end(), j) != v.end() ? "1" : "0";
    };
    Rows scores;
    for (CandidateId j = 0; j < config.num_candidates; ++j)
        scores.push_back({num(j), std::to_string(candidates[j].capability_rank), in(cmp.bribers, j),
                          num(cmp.scores_without[j]), num(cmp.scores_with[j]),
                          in(cmp.without_trust, j), in(cmp.with_trust, j)});
    write_csv(out / (name + "_scores.csv"),
              {"candidate", "capability_rank", "briber", "score_without_trust", "score_with_trust",
               "elected_without_trust", "elected_with_trust"},
              scores);
    return {name + ".csv", name + "_scores.csv"};
}

} // namespace

fs::path default_scenario_dir() { return fs::path(VCSIM_SCENARIO_DIR); }

const std::vector<std::string>& reproduce_targets() {
    static const std::vector<std::string> targets{"fig2", "fig3", "fig4", "fig5",
                                                  "fig7", "fig8", "table1", "table2"};
    return targets;
}

std::vector<std::string> reproduce(const std::string& target, const fs::path& scenario_dir,
                                   const fs::path& out_dir,
                                   const std::vector<std::string>& overrides,
                                   std::vector<std::string>& warnings, json& config_used) {
    const auto& valid = reproduce_targets();
    if (std::find(valid.begin(), valid.end(), target) == valid.end()) {
        std::string list;
        for (const auto& t : valid) list += (list.empty() ? "" : ", ") + t;
        fail(ErrorKind::configuration, "unknown target '" + target + "' (valid: " + list + ")");
    }
    fs::create_directories(out_dir);
    config_used = nullptr;
    if (target == "fig2") return fig2(out_dir);
    if (target == "fig3") return fig3(out_dir);
    if (target == "fig4") return fig4(out_dir);
    if (target == "table1" || target == "table2")
        return table(target, load_scenario(scenario_dir, target, overrides, config_used), out_dir);
    const auto config = load_scenario(scenario_dir, "rewards", overrides, config_used);
    if (target == "fig5") return fig5(config, out_dir, warnings);
    if (target == "fig7") return fig7(config, out_dir, warnings);
    return fig8(config, out_dir, warnings);
}

} // namespace vcsim::cli

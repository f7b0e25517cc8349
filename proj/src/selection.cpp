#include "vcsim/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace vcsim {

std::string_view to_string(AvailabilityFn fn) {
    switch (fn) {
    case AvailabilityFn::power: return "power";
    case AvailabilityFn::exponential: return "exponential";
    case AvailabilityFn::linear: return "linear";
    }
    return "unknown";
}

AvailabilityFn parse_availability_fn(std::string_view name) {
    if (name == "power" || name == "d1") return AvailabilityFn::power;
    if (name == "exponential" || name == "d2") return AvailabilityFn::exponential;
    if (name == "linear" || name == "d3") return AvailabilityFn::linear;
    fail(ErrorKind::configuration, "unknown availability_fn '" + std::string(name) +
                                       "' (expected power, exponential or linear)");
}

double availability(AvailabilityFn fn, double u) {
    require(u >= 0.0 && u <= 1.0, ErrorKind::domain, "unavailability must lie in [0,1]");
    switch (fn) {
    case AvailabilityFn::power:
        return 1.0 - u * u;
    case AvailabilityFn::exponential: {
        const double floor = std::exp(-3.0);
        return (std::exp(-3.0 * u) - floor) / (1.0 - floor);
    }
    case AvailabilityFn::linear:
        return 1.0 - u;
    }
    return 0.0;
}

void MeritParams::validate() const {
    require(rho > 0.0 && std::isfinite(rho), ErrorKind::configuration, "rho must be positive");
    require(profit_cap > 0.0, ErrorKind::configuration, "profit_cap must be positive");
}

double estimate_unavailability(const HistoryLedger& ledger, CandidateId j,
                               RoundIndex through_round) {
    const auto times = ledger.times_elected(j, through_round);
    if (times == 0) return 0.0;
    return static_cast<double>(ledger.times_unavailable(j, through_round)) /
           static_cast<double>(times);
}

double merit(double u, double profit, const MeritParams& params) {
    require(profit >= 0.0, ErrorKind::validation, "profit must be nonnegative");
    require(profit <= params.profit_cap, ErrorKind::validation,
            "profit " + std::to_string(profit) + " exceeds profit_cap " +
                std::to_string(params.profit_cap));
    return params.rho * availability(params.availability_fn, u) + profit;
}

PressureTable pressure_table(const HistoryLedger& ledger, RoundIndex t) {
    require(t >= 1, ErrorKind::out_of_range, "pressure is defined from round 1");
    PressureTable table{t, Grid<double>(ledger.voters(), ledger.candidates(), 0.0)};
    if (t == 1) return table;
    for (VoterId i = 0; i < ledger.voters(); ++i) {
        for (CandidateId j = 0; j < ledger.candidates(); ++j) {
            const auto cum = ledger.cumulative(i, j, t - 1);
            table.values(i, j) = cum.merit - static_cast<double>(cum.count);
        }
    }
    return table;
}

Grid<double> ranking_queue(const PressureTable& pressure) {
    Grid<double> q(pressure.values.rows(), pressure.values.cols());
    for (std::size_t i = 0; i < q.rows(); ++i)
        for (std::size_t j = 0; j < q.cols(); ++j) q(i, j) = -pressure.values(i, j);
    return q;
}

std::vector<CandidateId> choose_topk(std::span<const double> pressure_row, std::size_t k) {
    require(k <= pressure_row.size(), ErrorKind::configuration,
            "k_supernodes exceeds num_candidates");
    std::vector<CandidateId> ids(pressure_row.size());
    std::iota(ids.begin(), ids.end(), CandidateId{0});
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k), ids.end(),
                      [&](CandidateId a, CandidateId b) {
                          if (pressure_row[a] != pressure_row[b])
                              return pressure_row[a] > pressure_row[b];
                          return a < b;
                      });
    ids.resize(k);
    return ids;
}

double min_rho(double Lambda, double profit_cap, double d_value) {
    require(Lambda > 0.0, ErrorKind::domain, "Lambda must be positive");
    require(profit_cap >= 0.0 && profit_cap <= 1.0, ErrorKind::domain,
            "profit cap R must lie in [0,1]");
    require(d_value >= 0.0, ErrorKind::domain, "availability value must be nonnegative");
    if (d_value == 0.0) {
        fail(ErrorKind::singularity,
             "d(u) = 0: the ranking queue is unstable for every rho");
    }
    return Lambda * (1.0 - profit_cap) / d_value;
}

} // namespace vcsim

// Selection-pressure voting: merit, pressure, ranking queue and each voter's
// top-K choice.

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "vcsim/core.hpp"

namespace vcsim {

enum class AvailabilityFn { power, exponential, linear };

std::string_view to_string(AvailabilityFn fn);
AvailabilityFn parse_availability_fn(std::string_view name);

/// d(u) for u in [0,1]. All three forms satisfy d(0)=1, d(1)=0 and are
/// strictly decreasing:
///   power:       1 - u^2
///   exponential: (e^{-3u} - e^{-3}) / (1 - e^{-3})
///   linear:      1 - u
double availability(AvailabilityFn fn, double u);

struct MeritParams {
    double rho = 5.0;
    AvailabilityFn availability_fn = AvailabilityFn::linear;
    double profit_cap = 12.5;

    void validate() const;
};

// F_ij^t for one round; rows are voters.
struct PressureTable {
    RoundIndex round = 1;
    Grid<double> values;
};

/// Unavailable events divided by times elected over rounds 1..through_round.
/// A candidate that was never elected gets 0.
double estimate_unavailability(const HistoryLedger& ledger, CandidateId j,
                               RoundIndex through_round);

/// m = rho * d(u) + profit.
double merit(double u, double profit, const MeritParams& params);

/// F_ij^t = M_ij^{t-1} - C_ij^{t-1}; all zeros at t = 1.
PressureTable pressure_table(const HistoryLedger& ledger, RoundIndex t);

/// Q_ij^t = -F_ij^t.
Grid<double> ranking_queue(const PressureTable& pressure);

/// The k candidates with the largest pressure, ordered by descending pressure
/// then ascending id.
std::vector<CandidateId> choose_topk(std::span<const double> pressure_row, std::size_t k);

/// Smallest rho keeping the ranking queue stable: Lambda (1 - R) / d.
double min_rho(double Lambda, double profit_cap, double d_value);

} // namespace vcsim

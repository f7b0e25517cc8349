#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "support.hpp"
#include "vcsim/rng.hpp"
#include "vcsim/trust.hpp"

using namespace vcsim;
using vcsim::testing::push_round;

namespace {

// Two voters, candidates {0, 1}, K = 1. Voter 0 is i and voter 1 is r; each
// round lists (c_i0, c_r0, e_0).
HistoryLedger history(std::initializer_list<std::array<int, 3>> rounds) {
    HistoryLedger h(2, 2, 1);
    for (const auto& [ci, cr, e] : rounds)
        push_round(h, {{{ci, 1 - ci}, {cr, 1 - cr}}, {e ? CandidateId{0} : CandidateId{1}}, {}, {}});
    return h;
}

double smoothed(double hits, double trials) { return (hits + 1.0) / (trials + 2.0); }

} // namespace

TEST_CASE("cold start belief") { CHECK(cold_start_belief() == 0.5); }

TEST_CASE("clipping") {
    CHECK(clip_belief(0.0) == 1e-6);
    CHECK(clip_belief(1.0) == 1.0 - 1e-6);
    CHECK(clip_belief(0.3) == 0.3);
}

TEST_CASE("prior belief") {
    const auto h = history({{1, 1, 1}, {1, 1, 0}, {0, 0, 1}});
    // r chose j in both rounds i did, and not in the one i did not.
    const double given_chosen = smoothed(2, 2);
    const double given_not = smoothed(0, 1);
    CHECK(given_chosen == doctest::Approx(0.75));
    CHECK(given_not == doctest::Approx(1.0 / 3.0));
    CHECK(prior_belief(h, 0, 1, 0, 4, 0.6) ==
          doctest::Approx(given_chosen * 0.6 + given_not * 0.4));
    CHECK(prior_belief(h, 0, 1, 0, 4, 0.6) == doctest::Approx(0.58333).epsilon(1e-4));
    CHECK(prior_belief(h, 0, 1, 0, 4, 1.0) == doctest::Approx(given_chosen));

    // i never chose j: the chosen-branch conditional is the smoothed 1/2.
    const auto never = history({{0, 1, 0}, {0, 0, 1}});
    CHECK(prior_belief(never, 0, 1, 0, 3, 1.0) == doctest::Approx(0.5));
    CHECK(prior_belief(never, 0, 1, 0, 3, 0.0) == doctest::Approx(smoothed(1, 2)));

    CHECK_THROWS_AS(prior_belief(h, 0, 0, 0, 4, 0.5), Error);
}

TEST_CASE("election prediction") {
    const auto h = history({{1, 1, 1}, {1, 1, 0}, {0, 0, 1}});
    const auto chosen = predict_election(h, 0, 0, 4, true);
    CHECK(chosen.elected == doctest::Approx(smoothed(1, 2)));
    CHECK(chosen.elected + chosen.not_elected == doctest::Approx(1.0));
    const auto skipped = predict_election(h, 0, 0, 4, false);
    CHECK(skipped.elected == doctest::Approx(smoothed(1, 1)));
    const auto first = predict_election(h, 0, 0, 1, true);
    CHECK(first.elected == 0.5);
}

TEST_CASE("posterior belief") {
    // c_r = [1, 1, 0], e_j = [1, 0, 1].
    const auto h = history({{1, 1, 1}, {0, 1, 0}, {1, 0, 1}});
    const double given_high = smoothed(1, 2);
    const double given_low = smoothed(1, 1);
    CHECK(given_high == doctest::Approx(0.5));
    CHECK(given_low == doctest::Approx(2.0 / 3.0));
    const double y = posterior_belief(h, 0, 1, 0, 4, true, {0.8, 0.2});
    CHECK(y == doctest::Approx(given_high * 0.8 + given_low * 0.2));
    CHECK(y == doctest::Approx(0.53333).epsilon(1e-4));
    CHECK(posterior_belief(h, 0, 1, 0, 4, true, {1.0, 0.0}) == doctest::Approx(given_high));

    // j never elected: the high-capability conditional is the smoothed 1/2.
    const auto never = history({{1, 1, 0}, {1, 1, 0}});
    CHECK(posterior_belief(never, 0, 1, 0, 3, true, {1.0, 0.0}) == doctest::Approx(0.5));
}

TEST_CASE("scoring rules") {
    CHECK(score_w(0.5, true, ScoreForm::logarithmic) == doctest::Approx(std::log(0.5)));
    CHECK(score_w(0.5, true, ScoreForm::logarithmic) == doctest::Approx(-0.6931).epsilon(1e-4));
    CHECK(score_w(0.2, false, ScoreForm::logarithmic) == doctest::Approx(std::log(0.8)));
    CHECK(score_w(1.0 - 1e-6, true, ScoreForm::quadratic) == doctest::Approx(1.0));
    CHECK(score_w(1e-6, false, ScoreForm::quadratic) == doctest::Approx(1.0));
    CHECK_THROWS_AS(score_w(0.0, true, ScoreForm::logarithmic), Error);
    CHECK_THROWS_AS(score_w(1.0, false, ScoreForm::quadratic), Error);
}

TEST_CASE("beta and trust centering") {
    TrustParams p;
    const std::vector<ReportPair> same{{0.3, 0.6}, {0.3, 0.6}};
    const std::vector<std::uint8_t> both{1, 1};
    CHECK(beta(same, both, p) == -raw_score(0.3, 0.6, true, p));

    const std::vector<ReportPair> one{{0.7, 0.2}};
    const std::vector<std::uint8_t> c0{0};
    const double b1 = beta(one, c0, p);
    CHECK(trustworthiness({0, 1, 0, 1, 0.7, 0.2}, false, b1, p) == 0.0);

    // Pick beliefs whose log scores are exactly -0.2, -0.4, -0.6 when alpha = 1.
    p.alpha = 1.0;
    const std::vector<ReportPair> three{
        {std::exp(-0.2), 0.5}, {std::exp(-0.4), 0.5}, {std::exp(-0.6), 0.5}};
    const std::vector<std::uint8_t> ones{1, 1, 1};
    const double b = beta(three, ones, p);
    CHECK(b == doctest::Approx(0.4));
    const double expected[] = {0.2, 0.0, -0.2};
    for (std::size_t i = 0; i < 3; ++i) {
        const BeliefReport r{i, (i + 1) % 3, 0, 2, three[i].prior, three[i].posterior};
        CHECK(trustworthiness(r, true, b, p) == doctest::Approx(expected[i]).epsilon(1e-12));
    }

    // alpha = 1: the posterior has no effect.
    CHECK(raw_score(0.4, 0.1, true, p) == raw_score(0.4, 0.9, true, p));
}

TEST_CASE("trust sums to zero for random reports") {
    auto eng = make_stream(21, "zero-sum");
    for (auto form : {ScoreForm::logarithmic, ScoreForm::quadratic}) {
        TrustParams p;
        p.form = form;
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n = 2 + uniform_below(eng, 40);
            std::vector<ReportPair> reports(n);
            std::vector<std::uint8_t> choices(n);
            for (std::size_t i = 0; i < n; ++i) {
                reports[i] = {clip_belief(uniform01(eng)), clip_belief(uniform01(eng))};
                choices[i] = uniform01(eng) < 0.5;
            }
            const double b = beta(reports, choices, p);
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                sum += trustworthiness({i, 0, 0, 2, reports[i].prior, reports[i].posterior},
                                       choices[i] != 0, b, p);
            CHECK(std::abs(sum) < 1e-9);
        }
    }
}

TEST_CASE("peer assignment") {
    const auto a = assign_peers(10, 3, 77);
    CHECK(a == assign_peers(10, 3, 77));
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] != i);
        CHECK(a[i] < 10);
    }
    CHECK(a != assign_peers(10, 4, 77));
    CHECK(assign_peers(2, 1, 5) == std::vector<VoterId>{1, 0});
    CHECK_THROWS_AS(assign_peers(1, 1, 5), Error);
}

TEST_CASE("incentive compatibility search") {
    // Independent oracle: brute-force the same lattice with the scoring rule
    // written out longhand.
    auto oracle = [](double p1, double p2, double alpha, bool quadratic) {
        auto w = [&](double y, double p) {
            return quadratic ? p * (2 * y - y * y) + (1 - p) * (1 - y * y)
                             : p * std::log(y) + (1 - p) * std::log(1 - y);
        };
        double best = -std::numeric_limits<double>::infinity(), by = 0, byp = 0;
        for (int a = 1; a < 100; ++a)
            for (int b = 1; b < 100; ++b) {
                const double e = alpha * w(a / 100.0, p1) + (1 - alpha) * w(b / 100.0, p2);
                if (e > best) best = e, by = a / 100.0, byp = b / 100.0;
            }
        return std::pair{by, byp};
    };

    const auto r = ic_check(0.7, 0.4, 0.5, ScoreForm::logarithmic, 0.01);
    CHECK(r.argmax_prior == doctest::Approx(0.70));
    CHECK(r.argmax_posterior == doctest::Approx(0.40));
    const auto [oy, oyp] = oracle(0.7, 0.4, 0.5, false);
    CHECK(r.argmax_prior == doctest::Approx(oy));
    CHECK(r.argmax_posterior == doctest::Approx(oyp));

    const auto q = ic_check(0.5, 0.5, 0.5, ScoreForm::quadratic, 0.01);
    CHECK(q.argmax_prior == doctest::Approx(0.5));
    CHECK(q.argmax_posterior == doctest::Approx(0.5));

    const auto a1 = ic_check(0.3, 0.8, 1.0, ScoreForm::logarithmic, 0.01);
    CHECK(a1.argmax_prior == doctest::Approx(0.3));

    CHECK_THROWS_AS(ic_check(0.5, 0.5, 0.5, ScoreForm::logarithmic, 0.5), Error);
}

TEST_CASE("misreports score strictly lower") {
    for (auto form : {ScoreForm::logarithmic, ScoreForm::quadratic}) {
        for (double alpha : {0.3, 0.5, 0.7}) {
            for (int x = 1; x <= 9; ++x) {
                for (int y = 1; y <= 9; ++y) {
                    const double p1 = x / 10.0, p2 = y / 10.0;
                    const double truth = expected_score(p1, p2, p1, p2, alpha, form);
                    for (double d : {-0.2, 0.2}) {
                        if (p1 + d > 0.0 && p1 + d < 1.0)
                            CHECK(expected_score(p1 + d, p2, p1, p2, alpha, form) < truth);
                        if (p2 + d > 0.0 && p2 + d < 1.0)
                            CHECK(expected_score(p1, p2 + d, p1, p2, alpha, form) < truth);
                    }
                }
            }
        }
    }
}

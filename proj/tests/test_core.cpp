#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "support.hpp"
#include "vcsim/core.hpp"
#include "vcsim/rng.hpp"

using namespace vcsim;
using vcsim::testing::push_round;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::validation;
}

} // namespace

TEST_CASE("first round is accepted") {
    HistoryLedger h(2, 3, 1);
    push_round(h, {{{1, 0, 0}, {0, 1, 0}}, {0}, {}, {}});
    CHECK(h.rounds_completed() == 1);
    CHECK(h.choice(0, 0, 1));
    CHECK_FALSE(h.choice(1, 0, 1));
    CHECK(h.elected(0, 1));
}

TEST_CASE("a gap in rounds is a sequencing error") {
    HistoryLedger h(1, 2, 1);
    for (int k = 0; k < 3; ++k) push_round(h, {{{1, 0}}, {0}, {}, {}});
    RoundOutcome out;
    out.round = 5;
    CHECK(kind_of([&] { h.append_round(out, ChoiceMatrix(1, 2), Grid<double>(1, 2)); }) ==
          ErrorKind::sequencing);
    CHECK(h.rounds_completed() == 3);
}

TEST_CASE("elected set must have exactly K members") {
    HistoryLedger h(1, 6, 5);
    CHECK(kind_of([&] { push_round(h, {{{1, 1, 1, 1, 1, 0}}, {0, 1}, {}, {}}); }) ==
          ErrorKind::validation);
    CHECK(h.rounds_completed() == 0);
}

TEST_CASE("voters must choose exactly K candidates") {
    HistoryLedger h(2, 3, 1);
    CHECK(kind_of([&] { push_round(h, {{{1, 1, 0}, {0, 1, 0}}, {1}, {}, {}}); }) ==
          ErrorKind::validation);
}

TEST_CASE("unavailable candidates must have been elected") {
    HistoryLedger h(1, 2, 1);
    CHECK(kind_of([&] { push_round(h, {{{1, 0}}, {0}, {1}, {}}); }) == ErrorKind::validation);
}

TEST_CASE("cumulative merit and count") {
    // Voter 0 and candidate 0: merits 2 then 3, chosen only in round 1.
    HistoryLedger h(1, 2, 1);
    push_round(h, {{{1, 0}}, {0}, {}, {{2.0, 0.0}}});
    push_round(h, {{{0, 1}}, {1}, {}, {{3.0, 0.0}}});
    const auto c = h.cumulative(0, 0, 2);
    CHECK(c.merit == doctest::Approx(2.0 + 3.0));
    CHECK(c.count == 1);

    const auto empty = h.cumulative(0, 0, 0);
    CHECK(empty.merit == 0.0);
    CHECK(empty.count == 0);

    const auto first = h.cumulative(0, 0, 1);
    CHECK(first.merit == 2.0);
    CHECK(first.count == 1);
}

TEST_CASE("merits accumulate without choices") {
    HistoryLedger h(1, 2, 1);
    for (int k = 0; k < 3; ++k) push_round(h, {{{0, 1}}, {1}, {}, {{1.0, 0.0}}});
    const auto c = h.cumulative(0, 0, 3);
    CHECK(c.merit == 3.0);
    CHECK(c.count == 0);
}

TEST_CASE("queries outside recorded history are rejected") {
    HistoryLedger h(1, 2, 1);
    push_round(h, {{{1, 0}}, {0}, {}, {}});
    CHECK(kind_of([&] { (void)h.cumulative(0, 0, 2); }) == ErrorKind::out_of_range);
    CHECK(kind_of([&] { (void)h.choice(0, 0, 0); }) == ErrorKind::out_of_range);
    CHECK(kind_of([&] { (void)h.choice(3, 0, 1); }) == ErrorKind::out_of_range);
}

TEST_CASE("cumulative matches a direct sum over a random history") {
    const std::size_t n = 3, m = 5, k = 2, rounds = 12;
    HistoryLedger h(n, m, k);
    auto eng = make_stream(99, "test-history");
    std::vector<vcsim::testing::RoundSpec> specs;
    for (std::size_t t = 0; t < rounds; ++t) {
        vcsim::testing::RoundSpec s;
        s.choices.assign(n, std::vector<int>(m, 0));
        s.merits.assign(n, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t picked = 0;
            while (picked < k) {
                const auto j = uniform_below(eng, m);
                if (!s.choices[i][j]) {
                    s.choices[i][j] = 1;
                    ++picked;
                }
            }
            for (std::size_t j = 0; j < m; ++j) s.merits[i][j] = uniform01(eng) * 4.0;
        }
        s.elected = {t % m, (t + 1) % m};
        if (t % 3 == 0) s.unavailable = {t % m};
        push_round(h, s);
        specs.push_back(s);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t through = 0; through <= rounds; ++through) {
                double msum = 0.0;
                std::uint32_t csum = 0;
                for (std::size_t t = 0; t < through; ++t) {
                    msum += specs[t].merits[i][j];
                    csum += specs[t].choices[i][j];
                }
                const auto c = h.cumulative(i, j, through);
                CHECK(c.merit == doctest::Approx(msum).epsilon(1e-12));
                CHECK(c.count == csum);
            }
        }
    }
    std::uint32_t elected = 0, unavailable = 0;
    for (std::size_t t = 0; t < rounds; ++t) {
        for (auto j : specs[t].elected) elected += j == 2;
        for (auto j : specs[t].unavailable) unavailable += j == 2;
    }
    CHECK(h.times_elected(2, rounds) == elected);
    CHECK(h.times_unavailable(2, rounds) == unavailable);
}

TEST_CASE("profiles are validated") {
    std::vector<VoterProfile> voters{{0, 1}, {1, 0}};
    CHECK(kind_of([&] { validate_voters(voters); }) == ErrorKind::validation);
    std::vector<CandidateProfile> candidates{{0, 0.1, 1}, {1, 0.2, 1}};
    CHECK(kind_of([&] { validate_candidates(candidates); }) == ErrorKind::validation);
}

TEST_CASE("streams are keyed by seed and label") {
    auto a = make_stream(1, "x", 3);
    auto b = make_stream(1, "x", 3);
    auto c = make_stream(1, "y", 3);
    auto d = make_stream(2, "x", 3);
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
    CHECK(va != d());
    auto e = make_stream(5, "u");
    for (int i = 0; i < 1000; ++i) {
        const double u = uniform01(e);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

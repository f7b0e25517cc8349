#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "vcsim/error.hpp"
#include "vcsim/ldp.hpp"

using namespace vcsim;

namespace {

// Independent maximiser of G(theta): coarse scan then bisection on G'.
double legendre_oracle(double x, double lambda, double Lambda) {
    auto g = [&](double t) { return t * x - Lambda * (std::exp(t) - 1) - lambda * (std::exp(-t) - 1); };
    auto dg = [&](double t) { return x - Lambda * std::exp(t) + lambda * std::exp(-t); };
    double lo = -30, hi = 30;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (dg(mid) > 0 ? lo : hi) = mid;
    }
    return g(0.5 * (lo + hi));
}

// P(max_{t <= horizon} Q_t >= threshold) for the walk Q_1 = 0 with
// Poisson(Lambda) - Poisson(lambda) increments, by dynamic programming.
double exact_exceedance(double lambda, double Lambda, int horizon, int threshold) {
    auto pmf = [](double mu, int n) { return std::exp(n * std::log(mu) - mu - std::lgamma(n + 1.0)); };
    std::map<int, double> step;
    for (int a = 0; a < 40; ++a)
        for (int b = 0; b < 40; ++b) step[a - b] += pmf(Lambda, a) * pmf(lambda, b);
    std::map<int, double> alive{{0, 1.0}};
    if (threshold <= 0) return 1.0;
    double hit = 0.0;
    for (int t = 2; t <= horizon; ++t) {
        std::map<int, double> next;
        for (const auto& [q, p] : alive)
            for (const auto& [d, pd] : step) {
                const int v = q + d;
                if (v >= threshold) hit += p * pd;
                else if (v > -60) next[v] += p * pd;
            }
        alive.swap(next);
    }
    return hit;
}

} // namespace

TEST_CASE("theta star") {
    CHECK(theta_star(1.0, 2.0, 1.0) == doctest::Approx(std::log(2.0)));
    CHECK(theta_star(3.0 - 1.5, 3.0, 1.5) == doctest::Approx(std::log(2.0)));
    CHECK(std::abs(theta_star(1e-9, 1.0, 1.0)) < 1e-8);
}

TEST_CASE("convex conjugate") {
    CHECK(legendre(1.0, 2.0, 1.0) == doctest::Approx(std::log(2.0)));
    CHECK(legendre(3.0, 5.0, 2.0) == doctest::Approx(3.0 * std::log(5.0 / 2.0)));
    const double at0 = std::pow(std::sqrt(2.0) - 1.0, 2);
    CHECK(legendre(1e-12, 2.0, 1.0) == doctest::Approx(at0).epsilon(1e-9));
    CHECK(legendre_oracle(0.0, 2.0, 1.0) == doctest::Approx(at0).epsilon(1e-9));
    for (double x : {0.05, 0.5, 1.0, 2.5, 7.0})
        for (double lam : {1.1, 2.0, 4.0}) {
            CAPTURE(x);
            CAPTURE(lam);
            const double o = legendre_oracle(x, lam, 1.0);
            CHECK(legendre(x, lam, 1.0) == doctest::Approx(o).epsilon(1e-9));
            CHECK(legendre_numeric(x, lam, 1.0) == doctest::Approx(o).epsilon(1e-8));
        }
}

TEST_CASE("rate function") {
    CHECK(rate_function(0.0, 2.0, 1.0) == 0.0);
    CHECK(rate_function(1.0, 2.0, 1.0) == doctest::Approx(0.6931).epsilon(1e-4));
    CHECK(rate_function(3.0, std::exp(1.0), 1.0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(rate_function(-1.0, 2.0, 1.0), Error);
    try {
        (void)rate_function(1.0, 1.0, 1.0);
        FAIL("expected stability error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::stability);
        CHECK(std::string(e.what()) == "stability requires lambda > Lambda");
    }
}

TEST_CASE("variational rate matches the closed form") {
    for (double ratio : {1.1, 1.5, 2.0, 4.0})
        for (double b : {0.1, 1.0, 5.0, 10.0}) {
            const double closed = b * std::log(ratio);
            const auto m = rate_function_numeric(b, ratio, 1.0);
            CAPTURE(ratio);
            CAPTURE(b);
            CHECK(std::abs(m.value - closed) <= 1e-6 * (1.0 + closed));
            // The minimiser is b / (lambda - Lambda).
            CHECK(m.argmin == doctest::Approx(b / (ratio - 1.0)).epsilon(1e-3));
            CHECK(m.below_two == (b / (ratio - 1.0) < 2.0));
        }
}

TEST_CASE("effective valve") {
    CHECK(effective_valve(1.0, 2.0, 1.0) == 0.0);
    CHECK(effective_valve(0.1, 2.0, 1.0) == doctest::Approx(std::log(10.0) / std::log(2.0)));
    CHECK(effective_valve(0.1, 2.0, 1.0) == doctest::Approx(3.3219).epsilon(1e-4));
    CHECK_THROWS_AS(effective_valve(0.0, 2.0, 1.0), Error);
    CHECK_THROWS_AS(effective_valve(0.1, 1.0, 2.0), Error);
}

TEST_CASE("effective merit") {
    CHECK(effective_merit(1.0, 0.5, 3.0) == 0.5);
    CHECK(effective_merit(0.1, 0.5, 2.0) == doctest::Approx(0.5 * std::sqrt(10.0)));
    CHECK(effective_merit(0.1, 0.5, 1e9) == doctest::Approx(0.5));
    double prev_l = effective_merit(0.05, 0.5, 1.0);
    for (int L = 2; L <= 20; ++L) {
        const double v = effective_merit(0.05, 0.5, L);
        CHECK(v < prev_l);
        prev_l = v;
    }
}

TEST_CASE("monte carlo boundary levels") {
    McOptions o;
    o.horizon = 50;
    o.replicas = 2000;
    CHECK(mc_failure_rate(2.0, 1.0, 2.0 * 50 * 10, o).probability == 0.0);
    CHECK(mc_failure_rate(2.0, 1.0, -1.0, o).probability == 1.0);
    CHECK_THROWS_AS(mc_failure_rate(1.0, 1.0, 3.0, o), Error);
}

TEST_CASE("monte carlo matches exact short-horizon probabilities") {
    McOptions o;
    o.horizon = 6;
    o.replicas = 200000;
    o.seed = 4;
    const std::vector<double> levels{0.0, 1.0, 2.5};
    const auto est = mc_failure_rates(2.0, 1.0, levels, o);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const int thr = static_cast<int>(std::floor(levels[i])) + 1;
        const double p = exact_exceedance(2.0, 1.0, 6, thr);
        const double se = std::sqrt(p * (1 - p) / o.replicas);
        CAPTURE(levels[i]);
        CAPTURE(p);
        CHECK(std::abs(est[i].probability - p) < 4.0 * se + 1e-12);
    }
}

TEST_CASE("monte carlo is independent of the worker count and level set") {
    McOptions o;
    o.horizon = 300;
    o.replicas = 30000;
    o.seed = 12;
    const std::vector<double> levels{1.0, 3.0, 5.0};
    const auto one = mc_failure_rates(2.0, 1.0, levels, o);
    o.jobs = 4;
    const auto four = mc_failure_rates(2.0, 1.0, levels, o);
    for (std::size_t i = 0; i < levels.size(); ++i) CHECK(one[i].hits == four[i].hits);
    const auto single = mc_failure_rate(2.0, 1.0, 3.0, o);
    CHECK(single.hits == one[1].hits);
}

TEST_CASE("decay slope") {
    McOptions o;
    o.horizon = 2000;
    o.replicas = 200000;
    o.jobs = 4;
    const std::vector<double> l{1.0, 2.0, 3.0, 4.0};
    const auto one = verify_decay(2.0, 1.0, 1.0, l, o);
    CHECK(one.expected == doctest::Approx(-std::log(2.0)));
    CHECK(one.slope == doctest::Approx(one.expected).epsilon(0.1));
    // Doubling b doubles the slope.
    const auto two = verify_decay(2.0, 1.0, 2.0, l, o);
    CHECK(two.slope / one.slope == doctest::Approx(2.0).epsilon(0.1));
    // Nearly balanced rates decay slowly.
    const std::vector<double> wide{2.0, 4.0, 6.0, 8.0};
    const auto flat = verify_decay(1.05, 1.0, 1.0, wide, o);
    CHECK(std::abs(flat.slope) < 0.1);
}

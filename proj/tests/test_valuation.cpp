#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "aoisched/valuation.hpp"
#include "trace_checks.hpp"

using namespace aoisched;

TEST_CASE("freshness unit values")
{
    CHECK(freshness(0, 1, 20) == 1.0);
    CHECK(freshness(4, 1, 20) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(freshness(0, 2, 20) == doctest::Approx(1.0 / 21.0).epsilon(1e-15));
    CHECK_THROWS_AS(freshness(0, 0, 20), std::invalid_argument);
    CHECK_THROWS_AS(freshness(-1, 1, 20), std::invalid_argument);
}

TEST_CASE("freshness is decreasing in latency and in attempt")
{
    for (int xi = 1; xi <= 5; ++xi)
        for (int L = 0; L < 20; ++L) {
            CHECK(freshness(L + 1, xi, 20) < freshness(L, xi, 20));
            CHECK(freshness(0, xi + 1, 20) <= freshness(L, xi, 20));
        }
}

TEST_CASE("laxity identities")
{
    CHECK(laxity(5, 0) == 4);
    CHECK(laxity(5, 4) == 0);
    CHECK(laxity(5, 5) == -1);
    for (int W = 1; W <= 20; ++W) {
        CHECK(laxity(W, 0) == W - 1);
        CHECK(laxity(W, W - 1) == 0);
    }
}

TEST_CASE("slack indicator steps at zero")
{
    CHECK(slack_indicator(-1) == 0);
    CHECK(slack_indicator(0) == 1);
    CHECK(slack_indicator(7) == 1);
}

TEST_CASE("utility")
{
    const ValuationParams p;
    CHECK(utility(1.0, 1, p) == 1.0);
    CHECK(utility(0.2, 1, p) == doctest::Approx(0.2));
    CHECK(utility(0.7, 0, p) == 0.0);
    ValuationParams q;
    q.k_const = 2.0;
    q.beta = 2.0;
    CHECK(utility(0.5, 1, q) == doctest::Approx(0.5));
}

TEST_CASE("lateness")
{
    CHECK(lateness(4, 5) == 0);
    CHECK(lateness(6, 5) == 2);
    CHECK(lateness(1, 5) == -3);
}

TEST_CASE("penalty")
{
    const ValuationParams p;  // T = 100, d_max = 20
    CHECK(penalty(0.8, 0, 1, 10, p) == 0.0);
    CHECK(penalty(0.8, -3, 1, 10, p) == 0.0);
    // 0.5 * exp(-10 ln(88) / 100), 88 = 100 - 0 - 10 - 2
    const double expected = 0.5 * std::pow(88.0, -0.1);
    CHECK(std::abs(penalty(0.5, 2, 1, 10, p) - expected) <= 1e-12);
    CHECK(std::abs(penalty(0.5, 2, 1, 10, p) - 0.3196) < 1e-4);
    // log argument 100 - 3*20 - 50 - 5 < 1 is clamped, so the whole utility is lost
    CHECK(penalty(0.4, 5, 4, 50, p) == doctest::Approx(0.4));
    CHECK(effective_utility(0.5, penalty(0.5, 2, 1, 10, p)) == doctest::Approx(0.5 - expected));
    CHECK(effective_utility(0.0, 0.0) == 0.0);
}

TEST_CASE("penalty stays within [0, U]")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> lt(-5, 60), xi(1, 6), d(1, 200);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ValuationParams p;
    for (int n = 0; n < 20000; ++n) {
        const double U = u(rng);
        const double P = penalty(U, lt(rng), xi(rng), d(rng), p);
        CHECK(P >= 0.0);
        CHECK(P <= U);
    }
}

TEST_CASE("priority")
{
    CHECK(priority(0.3, 0) == std::numeric_limits<double>::infinity());
    CHECK(priority(0.2, 1) == doctest::Approx(5.0));
    CHECK(priority(1.0, 1) == 1.0);
    CHECK_THROWS_AS(priority(0.0, 1), std::invalid_argument);
}

TEST_CASE("total latency")
{
    CHECK(total_latency(3, 10) == 13);
    CHECK(total_latency(7, 0) == 7);
    CHECK(total_latency(0, 10) == 10);
}

TEST_CASE("view of a critical sample")
{
    FlowLineState s = make_initial_state(2, 3, 5, 8);  // L = 4 = W - 1
    const SampleView v = make_view(s, ValuationParams{});
    CHECK(v.index == 2);
    CHECK(v.critical());
    CHECK(v.laxity == 0);
    CHECK(v.slack_X == 1);
    CHECK(v.utility == doctest::Approx(0.2));
    CHECK(v.priority == std::numeric_limits<double>::infinity());
    CHECK(v.penalty == 0.0);
    CHECK(v.effective_utility == v.utility);
}

TEST_CASE("one-slot ordering of non-critical samples")
{
    const auto r = checks::one_slot_ordering(11, 20000, ValuationParams{});
    CHECK(r.pairs == 20000);
    CHECK(r.violations == 0);
}

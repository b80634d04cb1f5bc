#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dpre/walk_stats.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

using namespace dpre;

static std::uint64_t hist_mass(const Histogram& h) {
    std::uint64_t m = 0;
    for (const auto& [k, v] : h) m += v;
    return m;
}

TEST_CASE("pair meeting counts match return counts of the doubled walk") {
    // the difference of two independent d=1 walks is again a simple walk,
    // so ordered n-step pairs and single 2n-step walks give the same
    // visit histogram
    for (int n = 1; n <= 8; ++n) {
        Histogram pairs = pair_coincidence_histogram(1, n);
        Histogram returns = return_count_histogram(1, 2 * n);
        CHECK(pairs == returns);
        CHECK(hist_mass(pairs) == path_count_unchecked(1, 2 * n));
    }
}

TEST_CASE("return counts at horizon 12 match the closed form") {
    // #{walks with exactly r returns} = 2^r * C(12 - r, 6); key = r + 1
    Histogram h = return_count_histogram(1, 12);
    REQUIRE(h.size() == 7);
    CHECK(h.at(1) == 924);
    CHECK(h.at(2) == 924);
    CHECK(h.at(3) == 840);
    CHECK(h.at(4) == 672);
    CHECK(h.at(5) == 448);
    CHECK(h.at(6) == 224);
    CHECK(h.at(7) == 64);
}

TEST_CASE("pair histogram masses cover the whole pair space at d=2") {
    Histogram pairs = pair_coincidence_histogram(2, 4);
    CHECK(hist_mass(pairs) == 65536); // 4^(2*4)
    CHECK(pairs == return_count_histogram(2, 8));
    for (const auto& [k, v] : pairs) {
        CHECK(k >= 1); // origin always counts
        CHECK(k <= 5);
    }
}

TEST_CASE("high coincidence fraction has an exact tiny case") {
    // n=2: threshold 2^0.8 = 1.74, so only the 4 identical pairs of the
    // 16 ordered pairs qualify
    CHECK(high_coincidence_fraction(1, 2, 0.3) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("high coincidence fraction decays once past the integer-threshold sawtooth") {
    // the ceiling of n^0.8 moves in integer jumps, so the fraction is not
    // monotone below n=6; from there it decays
    const double f6 = high_coincidence_fraction(1, 6, 0.3);
    const double f8 = high_coincidence_fraction(1, 8, 0.3);
    const double f10 = high_coincidence_fraction(1, 10, 0.3);
    const double f12 = high_coincidence_fraction(1, 12, 0.3);
    CHECK(f6 > f8);
    CHECK(f8 > f10);
    CHECK(f10 > f12);
    CHECK(f12 > 0.0);
    // n=4 needs all 4 meeting times, which forces identical paths: 16/256
    CHECK(high_coincidence_fraction(1, 4, 0.3) == doctest::Approx(0.0625).epsilon(1e-14));
}

TEST_CASE("enumeration respects the budget cap") {
    Limits tight;
    tight.enum_cap = 1 << 10;
    CHECK_THROWS_AS(pair_coincidence_histogram(1, 16, tight), BudgetExceeded);
    CHECK_THROWS_AS(return_count_histogram(1, 40, tight), BudgetExceeded);
}

TEST_CASE("monte carlo return stats are consistent and match known d=1 values") {
    const std::uint64_t m = 20000;
    ReturnStatsOptions opt;
    opt.escape_horizon = 4000;
    ReturnStats rs = return_stats_mc(1, 100, m, 1, opt);

    CHECK(rs.samples == m);
    CHECK(hist_mass(rs.visit_hist) == m);
    CHECK(hist_mass(rs.first_return_hist) + rs.first_return_censored == m);
    CHECK_FALSE(rs.escape_prob.has_value()); // recurrent dimension

    // P(first return at time 2) = 1/2; MC band 3 sigma
    const double p2 = static_cast<double>(rs.first_return_hist.at(2)) / static_cast<double>(m);
    CHECK(std::abs(p2 - 0.5) < 3.0 * std::sqrt(0.25 / static_cast<double>(m)));

    // P(no return by 100) = C(100,50) 2^-100 = 0.0795892
    const double cens = static_cast<double>(rs.first_return_censored) / static_cast<double>(m);
    CHECK(std::abs(cens - 0.0795892) < 3.0 * std::sqrt(0.0796 * 0.9204 / static_cast<double>(m)));
}

TEST_CASE("monte carlo escape probability at d=3 is near the transient value") {
    const std::uint64_t m = 3000;
    ReturnStatsOptions opt;
    opt.escape_horizon = 20000;
    ReturnStats rs = return_stats_mc(3, 50, m, 777, opt);
    REQUIRE(rs.escape_prob.has_value());
    // escape probability 0.659463; horizon truncation biases upward a bit,
    // the bias estimate bounds it
    CHECK(std::abs(*rs.escape_prob - 0.659463) < 0.03);
    CHECK(rs.escape_bias_estimate >= 0.0);
    CHECK(rs.escape_bias_estimate < 0.02);
    CHECK(rs.escape_horizon == 20000);
}

TEST_CASE("histogram serialization round trips") {
    Histogram h{{1, 10}, {3, 5}};
    std::ostringstream os;
    hist_to_csv(os, h, "visits");
    CHECK(os.str().find("visits") != std::string::npos);
    CHECK(os.str().find("3,5") != std::string::npos);

    nlohmann::json j = hist_to_json(h);
    CHECK(j.at("1").get<std::uint64_t>() == 10);
    CHECK(j.at("3").get<std::uint64_t>() == 5);
}

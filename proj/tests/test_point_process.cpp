#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dpre/point_process.hpp"

#include <vector>

using namespace dpre;

namespace {

GapProcess make_gp(std::vector<double> gaps, double g_max) {
    GapProcess gp;
    gp.d = 1;
    gp.n = 4;
    gp.g_max = g_max;
    gp.total_paths = 16;
    gp.gaps = std::move(gaps);
    return gp;
}

} // namespace

TEST_CASE("window counts count gaps at or below each threshold") {
    GapProcess gp = make_gp({0.1, 0.5, 1.0, 2.5}, 3.0);
    const double b[] = {0.5, 1.0, 2.0};
    std::vector<std::uint64_t> c = window_counts(gp, b);
    REQUIRE(c.size() == 3);
    CHECK(c[0] == 2); // 0.1 and the boundary value 0.5
    CHECK(c[1] == 3);
    CHECK(c[2] == 3);

    const double none[] = {0.05};
    CHECK(window_counts(gp, none)[0] == 0);

    const double all[] = {3.0};
    CHECK(window_counts(gp, all)[0] == 4);
}

TEST_CASE("window counts refuse thresholds past the collection cutoff") {
    GapProcess gp = make_gp({0.1}, 2.0);
    const double past[] = {2.5};
    CHECK_THROWS_AS(window_counts(gp, past), ConfigError);
}

TEST_CASE("order statistics split by k and tally missing environments") {
    std::vector<std::vector<double>> lists = {{0.3, 0.9}, {0.5}, {}};
    OrderStatSeries os = collect_order_stats(lists, 2);
    REQUIRE(os.k_max == 2);
    REQUIRE(os.by_k.size() == 2);
    CHECK(os.by_k[0] == std::vector<double>{0.3, 0.5});
    CHECK(os.by_k[1] == std::vector<double>{0.9});
    CHECK(os.missing[0] == 1);
    CHECK(os.missing[1] == 2);
}

TEST_CASE("pair audit flags heavily overlapping near-level paths") {
    // ids 0 and 1 at n=4 share sites at times 1..3: covariance 0.75
    std::vector<GapEntry> entries = {{0.1, 0}, {0.2, 1}, {5.0, 2}};

    PairDecorrelation pd = near_pair_decorrelation(1, 4, entries, 1.0, 0.5);
    CHECK(pd.qualifying == 2); // the 5.0 entry is outside the window
    CHECK(pd.pairs == 1);
    CHECK(pd.violating_pairs == 1);
    CHECK(pd.max_cov == doctest::Approx(0.75).epsilon(1e-15));

    // a looser threshold keeps the same max but clears the violation
    PairDecorrelation ok = near_pair_decorrelation(1, 4, entries, 1.0, 0.8);
    CHECK(ok.violating_pairs == 0);
    CHECK(ok.max_cov == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("pair audit handles empty and singleton windows") {
    std::vector<GapEntry> none;
    PairDecorrelation pd = near_pair_decorrelation(1, 4, none, 1.0, 0.5);
    CHECK(pd.qualifying == 0);
    CHECK(pd.pairs == 0);
    CHECK(pd.max_cov == 0.0);

    std::vector<GapEntry> one = {{0.1, 3}};
    PairDecorrelation pd1 = near_pair_decorrelation(1, 4, one, 1.0, 0.5);
    CHECK(pd1.qualifying == 1);
    CHECK(pd1.pairs == 0);
}

TEST_CASE("disjoint paths carry zero covariance in the audit") {
    // 0 runs right, 15 runs left: they never meet after the origin
    std::vector<GapEntry> entries = {{0.1, 0}, {0.2, 15}};
    PairDecorrelation pd = near_pair_decorrelation(1, 4, entries, 1.0, 0.1);
    CHECK(pd.pairs == 1);
    CHECK(pd.violating_pairs == 0);
    CHECK(pd.max_cov == 0.0);
}

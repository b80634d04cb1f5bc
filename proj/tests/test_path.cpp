#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dpre/path.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

using namespace dpre;

TEST_CASE("id codec round trips every path at d=1 and d=2") {
    for (PathId id = 0; id < 64; ++id) {
        Path p = path_from_id(1, 6, id);
        CHECK(id_of(p) == id);
        CHECK(p.steps.size() == 6);
        for (auto s : p.steps) CHECK(s < 2);
    }
    for (PathId id = 0; id < 256; ++id) {
        Path p = path_from_id(2, 4, id);
        CHECK(id_of(p) == id);
        for (auto s : p.steps) CHECK(s < 4);
    }
}

TEST_CASE("digits map to axis k>>1 with sign -1 when odd") {
    // single-step paths at d=2 pin the encoding
    const std::int32_t want[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (PathId k = 0; k < 4; ++k) {
        Path p = path_from_id(2, 1, k);
        CHECK(p.site(1)[0] == want[k][0]);
        CHECK(p.site(1)[1] == want[k][1]);
    }
}

TEST_CASE("most significant digit is the first step") {
    // id 5 = 101 in base 2: steps -1, +1, -1
    Path p = path_from_id(1, 3, 5);
    CHECK(p.site(1)[0] == -1);
    CHECK(p.site(2)[0] == 0);
    CHECK(p.site(3)[0] == -1);
    // ids sharing a step prefix form a contiguous block
    for (PathId id = 0; id < 4; ++id) CHECK(path_from_id(1, 3, id).site(1)[0] == 1);
    for (PathId id = 4; id < 8; ++id) CHECK(path_from_id(1, 3, id).site(1)[0] == -1);
}

TEST_CASE("sites are prefix sums of steps") {
    Path p = path_from_id(2, 5, 0b0110011101 % 1024);
    for (int m = 1; m <= p.n; ++m) {
        const int axis = p.steps[m - 1] >> 1;
        const int sign = (p.steps[m - 1] & 1) ? -1 : 1;
        for (int j = 0; j < p.d; ++j) {
            const std::int32_t prev = p.site(m - 1)[j];
            const std::int32_t want = prev + (j == axis ? sign : 0);
            CHECK(p.site(m)[j] == want);
        }
    }
}

TEST_CASE("path_from_steps agrees with path_from_id") {
    const std::vector<std::uint8_t> digits = {0, 3, 2, 1, 0};
    Path a = path_from_steps(2, 5, digits);
    Path b = path_from_id(2, 5, id_of(a));
    CHECK(a.steps == b.steps);
    CHECK(a.sites == b.sites);
}

TEST_CASE("codec rejects malformed input") {
    CHECK_THROWS_AS(path_from_id(1, 3, 8), std::invalid_argument);      // id past (2d)^n
    CHECK_THROWS_AS(path_from_id(0, 3, 0), std::invalid_argument);      // d < 1
    CHECK_THROWS_AS(path_from_id(kMaxEnumDim + 1, 2, 0), std::invalid_argument);
    const std::vector<std::uint8_t> bad = {0, 2};
    CHECK_THROWS_AS(path_from_steps(1, 2, bad), std::invalid_argument); // digit >= 2d
    CHECK_THROWS_AS(path_from_steps(1, 3, bad), std::invalid_argument); // wrong count
}

TEST_CASE("coincidences counts shared sites with and without the origin") {
    // +,+,- meets +,-,+ at times 1 and 3 but not 2
    Path a = path_from_steps(1, 3, std::vector<std::uint8_t>{0, 0, 1});
    Path b = path_from_steps(1, 3, std::vector<std::uint8_t>{0, 1, 0});
    CHECK(coincidences(a, b, false) == 2);
    CHECK(coincidences(a, b, true) == 3);
    CHECK(coincidences(a, a, false) == 3);
    CHECK(coincidences(a, a, true) == 4);

    Path c = path_from_id(1, 4, 0);
    CHECK_THROWS_AS(coincidences(a, c, true), std::invalid_argument);
    Path e = path_from_id(2, 3, 0);
    CHECK_THROWS_AS(coincidences(a, e, true), std::invalid_argument);
}

TEST_CASE("tuple_from_ids decodes in order") {
    const PathId ids[] = {7, 0, 3};
    PathTuple t = tuple_from_ids(1, 3, ids);
    REQUIRE(t.paths.size() == 3);
    CHECK(id_of(t.paths[0]) == 7);
    CHECK(id_of(t.paths[1]) == 0);
    CHECK(id_of(t.paths[2]) == 3);
}

TEST_CASE("path_count enforces the cap and checks overflow") {
    CHECK(path_count_unchecked(1, 10) == 1024);
    CHECK(path_count_unchecked(2, 8) == 65536);
    CHECK(path_count(1, 20, std::uint64_t{1} << 26) == (std::uint64_t{1} << 20));
    CHECK_THROWS_AS(path_count(1, 30, std::uint64_t{1} << 20), BudgetExceeded);
    CHECK_THROWS_AS(path_count_unchecked(8, 30), std::overflow_error); // 16^30 > 2^64
    CHECK_THROWS_AS(path_count_unchecked(0, 4), std::invalid_argument);
}

TEST_CASE("enumerate_paths yields all ids in order and respects the budget") {
    std::vector<Path> ps = enumerate_paths(1, 4);
    REQUIRE(ps.size() == 16);
    for (std::size_t i = 0; i < ps.size(); ++i) CHECK(id_of(ps[i]) == i);

    Limits tight;
    tight.enum_cap = 8;
    CHECK_THROWS_AS(enumerate_paths(1, 4, tight), BudgetExceeded);
}

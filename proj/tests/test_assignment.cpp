#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "beliefgraph/assignment/hungarian.hpp"

using namespace beliefgraph::assignment;

TEST_CASE("zero diagonal, unit off-diagonal picks the identity at cost 0") {
    CostMatrix c{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
    const auto s = solve(c);
    CHECK(s.row_to_col == std::vector<std::size_t>{0, 1, 2});
    CHECK(s.cost == 0.0);
    CHECK(brute_force(c).row_to_col == s.row_to_col);
}

TEST_CASE("2x2 worked example") {
    CostMatrix c{{1, 2}, {2, 4}};
    const auto s = solve(c);
    CHECK(s.row_to_col == std::vector<std::size_t>{1, 0});
    CHECK(s.cost == 4.0);
}

TEST_CASE("1x1 matrix") {
    CostMatrix c{{7}};
    const auto s = solve(c);
    CHECK(s.row_to_col == std::vector<std::size_t>{0});
    CHECK(s.cost == 7.0);
}

TEST_CASE("empty matrix has an empty matching") {
    const auto s = solve(CostMatrix{});
    CHECK(s.row_to_col.empty());
    CHECK(s.cost == 0.0);
}

TEST_CASE("brute force breaks ties towards the lexicographically smallest mapping") {
    CostMatrix c{{1, 1}, {1, 1}};
    CHECK(brute_force(c).row_to_col == std::vector<std::size_t>{0, 1});
    CostMatrix d{{0, 0, 5}, {0, 0, 5}, {5, 5, 0}};
    CHECK(brute_force(d).row_to_col == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("solve matches brute force on seeded random matrices") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> size(1, 6);
    std::uniform_real_distribution<double> entry(0.0, 10.0);
    for (int k = 0; k < 300; ++k) {
        const auto n = static_cast<std::size_t>(size(rng));
        CostMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) m(i, j) = entry(rng);
        }
        CHECK(solve(m).cost == brute_force(m).cost);
    }
}

TEST_CASE("integer matrices with many ties still reach the optimum") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> entry(0, 3);
    for (int k = 0; k < 200; ++k) {
        CostMatrix m(5, 5);
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) m(i, j) = entry(rng);
        }
        const auto s = solve(m);
        CHECK(s.cost == brute_force(m).cost);
        CHECK(assignment_cost(m, s.row_to_col) == s.cost);
    }
}

TEST_CASE("invalid input is rejected") {
    CHECK_THROWS_AS(solve(CostMatrix(2, 3)), AssignmentError);
    CostMatrix bad{{0, std::numeric_limits<double>::quiet_NaN()}, {1, 1}};
    CHECK_THROWS_AS(solve(bad), AssignmentError);
    CHECK_THROWS_AS((CostMatrix{{1, 2}, {3}}), AssignmentError);
}

TEST_CASE("padded problem decomposes into matches, births and deaths") {
    // Two rows, three columns; the third column is far from both rows.
    CostMatrix real{{0.5, 9, 9}, {9, 0.5, 9}};
    const auto r = solve_padded(real, 4.0, 4.0);
    CHECK(r.matches == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});
    CHECK(r.unmatched_rows.empty());
    CHECK(r.unmatched_cols == std::vector<std::size_t>{2});
    CHECK(r.cost == doctest::Approx(5.0));
}

TEST_CASE("a pairing dearer than death plus birth is split") {
    CostMatrix real{{9.0}};
    const auto r = solve_padded(real, 4.0, 4.0);
    CHECK(r.matches.empty());
    CHECK(r.unmatched_rows == std::vector<std::size_t>{0});
    CHECK(r.unmatched_cols == std::vector<std::size_t>{0});
    CHECK(r.cost == doctest::Approx(8.0));
}

TEST_CASE("forbidden entries are never matched when a virtual option exists") {
    CostMatrix real{{kForbidden, 1.0}, {1.0, kForbidden}};
    const auto r = solve_padded(real, 4.0, 4.0);
    CHECK(r.matches == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}});
}

TEST_CASE("pad layout") {
    CostMatrix real{{1, 2}};
    const auto m = pad(real, 3.0, 5.0);
    REQUIRE(m.rows() == 3);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == 2.0);
    CHECK(m(0, 2) == 3.0);  // row's private virtual column
    CHECK(m(1, 0) == 5.0);  // column 0's virtual row
    CHECK(m(2, 1) == 5.0);
}

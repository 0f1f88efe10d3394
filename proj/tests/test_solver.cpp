#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <string>
#include <vector>

#include <rankexpl/random.hpp>
#include <rankexpl/solver.hpp>

using namespace rankexpl;

namespace {

preference_matrix make_matrix(std::vector<std::string> terms, std::size_t cols,
                              std::vector<double> values) {
    preference_matrix m;
    m.query_id = "q";
    m.terms = std::move(terms);
    for (std::size_t c = 0; c < cols; ++c) m.pair_ids.push_back("p" + std::to_string(c));
    m.values = std::move(values);
    return m;
}

preference_matrix random_matrix(rng& gen, std::size_t rows, std::size_t cols) {
    std::vector<double> v(rows * cols);
    for (double& x : v) {
        x = gen.unit() * 2.0 - 1.0;
        if (gen.unit() < 0.3) x = 0.0;  // plant exact zeros and ties
    }
    std::vector<std::string> terms;
    for (std::size_t r = 0; r < rows; ++r) terms.push_back("w" + std::to_string(r));
    return make_matrix(std::move(terms), cols, std::move(v));
}

// Brute-force coverage straight from the definition, no shared code with
// the solver's aggregation.
long long cov_oracle(const preference_matrix& m, const std::vector<std::size_t>& rows) {
    long long covered = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        std::vector<std::size_t> sorted_rows = rows;
        std::sort(sorted_rows.begin(), sorted_rows.end());
        double y = 0.0;
        for (std::size_t r : sorted_rows) y += m.at(r, j);
        if (y > 0.0) ++covered;
    }
    return covered;
}

}  // namespace

TEST_CASE("pcov counts strictly positive aggregate columns") {
    // Rows: a covers columns 0 and 1; b kills column 1 and covers column 2.
    preference_matrix m = make_matrix({"a", "b"}, 3,
                                      {1.0, 2.0, 0.0,
                                       0.5, -2.0, 1.0});
    CHECK(pcov(m, std::vector<std::size_t>{0}) == 2);
    CHECK(pcov(m, std::vector<std::size_t>{1}) == 2);
    // Column 1 sums to exactly zero: not covered.
    CHECK(pcov(m, std::vector<std::size_t>{0, 1}) == 2);
    CHECK(pcov(m, std::vector<std::size_t>{}) == 0);
}

TEST_CASE("aggregate order does not change pcov") {
    rng gen(5);
    preference_matrix m = random_matrix(gen, 8, 12);
    std::vector<std::size_t> rows = {5, 1, 7, 2};
    std::vector<std::size_t> rev = {2, 7, 1, 5};
    CHECK(pcov(m, rows) == pcov(m, rev));
    CHECK(aggregate_rows(m, rows) == aggregate_rows(m, rev));
}

TEST_CASE("utility can be negative") {
    // Adding b destroys one of a's covered columns and adds none.
    preference_matrix m = make_matrix({"a", "b"}, 2,
                                      {1.0, 1.0,
                                       -2.0, 0.0});
    CHECK(utility(m, {0}, 1) == -1);
    CHECK(utility(m, {}, 0) == 2);
}

TEST_CASE("psum sums positive entries only") {
    preference_matrix m = make_matrix({"a"}, 4, {1.5, -2.0, 0.0, 0.25});
    CHECK(psum(m, 0) == 1.75);
}

TEST_CASE("greedy stops when utility goes non-positive") {
    // Second-best row only hurts; greedy must stop after one pick.
    preference_matrix m = make_matrix({"a", "b"}, 2,
                                      {2.0, 1.0,
                                       -1.0, -1.0});
    selection s = greedy_select(m, 5);
    CHECK(s.terms == std::vector<std::string>{"a"});
    CHECK(s.coverage == 2);
}

TEST_CASE("greedy returns nothing on an all-negative matrix") {
    preference_matrix m = make_matrix({"a", "b"}, 2,
                                      {-1.0, 0.0,
                                       0.0, -1.0});
    selection s = greedy_select(m, 3);
    CHECK(s.terms.empty());
    CHECK(s.coverage == 0);
}

TEST_CASE("greedy breaks utility ties by psum then term") {
    // Both rows cover the single column; b has the larger positive mass.
    preference_matrix m = make_matrix({"a", "b"}, 1, {1.0, 3.0});
    CHECK(greedy_select(m, 1).terms == std::vector<std::string>{"b"});
    // Identical rows: lexicographic.
    preference_matrix t = make_matrix({"zz", "aa"}, 1, {1.0, 1.0});
    CHECK(greedy_select(t, 1).terms == std::vector<std::string>{"aa"});
}

TEST_CASE("greedy coverage equals pcov of its selection") {
    rng gen(77);
    for (int round = 0; round < 50; ++round) {
        preference_matrix m = random_matrix(gen, 10, 14);
        selection s = greedy_select(m, 4);
        CHECK(s.coverage == pcov(m, s));
        CHECK(s.coverage == cov_oracle(m, s.rows));
        CHECK(s.rows.size() <= 4);
    }
}

TEST_CASE("greedy respects the budget") {
    rng gen(31);
    preference_matrix m = random_matrix(gen, 12, 20);
    CHECK(greedy_select(m, 1).rows.size() <= 1);
    CHECK(greedy_select(m, 3).rows.size() <= 3);
    CHECK_THROWS_AS(greedy_select(m, 0), config_error);
}

TEST_CASE("exact solver finds the optimum by definition") {
    rng gen(13);
    for (int round = 0; round < 30; ++round) {
        preference_matrix m = random_matrix(gen, 7, 9);
        selection ex = exact_select(m, 3);
        CHECK(ex.coverage == cov_oracle(m, ex.rows));
        // No subset of size <= 3 beats it.
        for (std::size_t a = 0; a < 7; ++a)
            for (std::size_t b = a; b < 7; ++b)
                for (std::size_t c = b; c < 7; ++c) {
                    std::vector<std::size_t> rows = {a};
                    if (b != a) rows.push_back(b);
                    if (c != b && c != a) rows.push_back(c);
                    CHECK(cov_oracle(m, rows) <= ex.coverage);
                }
    }
}

TEST_CASE("exact solver prefers the lexicographically least term set") {
    // Both single rows reach coverage 1.
    preference_matrix m = make_matrix({"zebra", "apple"}, 1, {1.0, 2.0});
    selection s = exact_select(m, 2);
    CHECK(s.coverage == 1);
    CHECK(s.terms == std::vector<std::string>{"apple"});
}

TEST_CASE("exact solver returns empty when nothing is coverable") {
    preference_matrix m = make_matrix({"a", "b"}, 2, {-1.0, 0.0, -0.5, -2.0});
    selection s = exact_select(m, 2);
    CHECK(s.terms.empty());
    CHECK(s.coverage == 0);
}

TEST_CASE("exact solver rejects oversized instances") {
    rng gen(1);
    preference_matrix m = random_matrix(gen, 23, 3);
    CHECK_THROWS_AS(exact_select(m, 2), config_error);
}

TEST_CASE("greedy never beats exact and usually matches it") {
    rng gen(2027);
    int matched = 0;
    const int rounds = 60;
    for (int round = 0; round < rounds; ++round) {
        preference_matrix m = random_matrix(gen, 9, 12);
        selection g = greedy_select(m, 3);
        selection ex = exact_select(m, 3);
        REQUIRE(g.coverage <= ex.coverage);
        matched += g.coverage == ex.coverage;
    }
    CHECK(matched > rounds / 2);
}

TEST_CASE("the objective is not submodular") {
    // Marginal gain of b is larger under the superset {x, c} than under
    // {x}: the column only turns positive once c has offset x.
    preference_matrix m = make_matrix({"x", "c", "b"}, 1,
                                      {-3.0,
                                       2.5,
                                       1.0});
    CHECK(utility(m, {0}, 2) == 0);
    CHECK(utility(m, {0, 1}, 2) == 1);
}

TEST_CASE("selection bookkeeping stays consistent") {
    rng gen(404);
    preference_matrix m = random_matrix(gen, 10, 10);
    selection s = greedy_select(m, 5);
    REQUIRE(s.terms.size() == s.rows.size());
    for (std::size_t i = 0; i < s.rows.size(); ++i) CHECK(m.terms[s.rows[i]] == s.terms[i]);
    std::size_t chosen_count = 0;
    for (char c : s.chosen) chosen_count += c;
    CHECK(chosen_count == s.rows.size());
}

// Apache License, Version 2.0, refer to LICENSE.txt
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "hiercpt/count_table.hpp"
#include "test_util.hpp"

using namespace hiercpt;

TEST_CASE("parent_config_index ranks with the last parent fastest") {
    REQUIRE(parent_config_index({0, 0}, {2, 3}) == 0);
    REQUIRE(parent_config_index({1, 2}, {2, 3}) == 5);
    REQUIRE(parent_config_index({}, {}) == 0);
    REQUIRE_THROWS_AS(parent_config_index({2, 0}, {2, 3}), data_error);
}

TEST_CASE("parent_config_index is a bijection onto [0, prod cards)") {
    std::vector<int> cards{3, 2, 4};
    std::vector<bool> hit(24, false);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 4; ++c) {
                int rank = parent_config_index({a, b, c}, cards);
                REQUIRE(rank >= 0);
                REQUIRE(rank < 24);
                REQUIRE_FALSE(hit[rank]);
                hit[rank] = true;
            }
}

static Dataset four_row_fixture() {
    Dataset ds;
    ds.variables = {{"child", 2, {"0", "1"}}, {"parent", 2, {"0", "1"}}};
    ds.rows.resize(4, 2);
    ds.rows << 0, 0, 1, 0, 0, 1, 0, 1;
    return ds;
}

TEST_CASE("count_table tallies the hand fixture") {
    auto ds = four_row_fixture();
    auto ct = count_table(ds, 0, {1});
    REQUIRE(ct.r == 2);
    REQUIRE(ct.q == 2);
    REQUIRE(ct.counts(0, 0) == 1);
    REQUIRE(ct.counts(1, 0) == 1);
    REQUIRE(ct.counts(0, 1) == 2);
    REQUIRE(ct.counts(1, 1) == 0);
    REQUIRE(ct.col_totals(0) == 2);
    REQUIRE(ct.col_totals(1) == 2);
    REQUIRE(ct.n_total() == ds.n_rows());
}

TEST_CASE("count_table of an empty dataset is all zeros") {
    Dataset ds;
    ds.variables = {{"child", 2, {"0", "1"}}, {"parent", 3, {"0", "1", "2"}}};
    ds.rows.resize(0, 2);
    auto ct = count_table(ds, 0, {1});
    REQUIRE(ct.counts.isZero());
    REQUIRE(ct.col_totals.isZero());
}

TEST_CASE("count_table with no parents is the marginal histogram") {
    auto ds = four_row_fixture();
    auto ct = count_table(ds, 0, {});
    REQUIRE(ct.q == 1);
    REQUIRE(ct.counts(0, 0) == 3);
    REQUIRE(ct.counts(1, 0) == 1);
}

TEST_CASE("count_table rejects duplicate parents and self-parenting") {
    auto ds = four_row_fixture();
    REQUIRE_THROWS_AS(count_table(ds, 0, {1, 1}), data_error);
    REQUIRE_THROWS_AS(count_table(ds, 0, {0}), data_error);
}

TEST_CASE("count_table is invariant to row permutation") {
    auto rng = make_rng(11);
    Dataset ds;
    ds.variables = {{"c", 3, {"0", "1", "2"}}, {"p1", 2, {"0", "1"}}, {"p2", 2, {"0", "1"}}};
    ds.rows.resize(60, 3);
    std::uniform_int_distribution<int> d3(0, 2), d2(0, 1);
    for (int i = 0; i < 60; ++i) {
        ds.rows(i, 0) = d3(rng);
        ds.rows(i, 1) = d2(rng);
        ds.rows(i, 2) = d2(rng);
    }
    auto ct = count_table(ds, 0, {1, 2});

    std::vector<int> perm(60);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Dataset shuffled = ds;
    for (int i = 0; i < 60; ++i) shuffled.rows.row(i) = ds.rows.row(perm[i]);
    auto ct2 = count_table(shuffled, 0, {1, 2});
    REQUIRE(ct.counts == ct2.counts);
}

TEST_CASE("marginalizing counts over the child gives the parent histogram") {
    auto rng = make_rng(12);
    Dataset ds;
    ds.variables = {{"c", 3, {"0", "1", "2"}}, {"p", 4, {"0", "1", "2", "3"}}};
    ds.rows.resize(120, 2);
    std::uniform_int_distribution<int> d3(0, 2), d4(0, 3);
    for (int i = 0; i < 120; ++i) {
        ds.rows(i, 0) = d3(rng);
        ds.rows(i, 1) = d4(rng);
    }
    auto ct = count_table(ds, 0, {1});
    std::vector<int> hist(4, 0);
    for (int i = 0; i < 120; ++i) hist[ds.code(i, 1)]++;
    for (int y = 0; y < 4; ++y) {
        REQUIRE(ct.counts.col(y).sum() == hist[y]);
        REQUIRE(ct.col_totals(y) == hist[y]);
    }
}

TEST_CASE("count table serializes to csv for debugging") {
    auto ds = four_row_fixture();
    auto ct = count_table(ds, 0, {1});
    std::ostringstream out;
    write_count_table_csv(out, ct);
    REQUIRE(out.str() == "x,y0,y1\n0,1,2\n1,1,0\n");
}

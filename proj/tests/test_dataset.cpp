// Apache License, Version 2.0, refer to LICENSE.txt
#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "hiercpt/dataset.hpp"
#include "test_util.hpp"

using namespace hiercpt;

TEST_CASE("load_csv encodes categorical levels by first appearance") {
    auto path = testutil::write_temp_file("cat.csv", "col\na\nb\na\n");
    auto table = load_csv(path, {ColumnKind::categorical}, true);
    REQUIRE(table.n_rows == 3);
    REQUIRE(table.columns[0].codes == std::vector<int>{0, 1, 0});
    REQUIRE(table.columns[0].labels == std::vector<std::string>{"a", "b"});
    auto ds = make_dataset(table, 5);
    REQUIRE(ds.variables[0].cardinality == 2);
}

TEST_CASE("load_csv header-only file gives zero rows with declared variables") {
    auto path = testutil::write_temp_file("empty.csv", "x,y\n");
    auto table = load_csv(path, {ColumnKind::categorical, ColumnKind::categorical}, true);
    REQUIRE(table.n_rows == 0);
    auto ds = make_dataset(table, 5);
    REQUIRE(ds.n_rows() == 0);
    REQUIRE(ds.n_vars() == 2);
    REQUIRE(ds.variables[0].name == "x");
}

TEST_CASE("load_csv drops rows with missing fields and counts them") {
    auto path = testutil::write_temp_file("missing.csv", "x,y\na,1\n,2\nb,3\n");
    auto table = load_csv(path, {ColumnKind::categorical, ColumnKind::numeric}, true);
    REQUIRE(table.n_rows == 2);
    REQUIRE(table.dropped_rows == 1);
}

TEST_CASE("load_csv rejects non-numeric tokens in numeric columns") {
    auto path = testutil::write_temp_file("badnum.csv", "x\n1.5\noops\n");
    REQUIRE_THROWS_AS(load_csv(path, {ColumnKind::numeric}, true), data_error);
}

TEST_CASE("load_csv rejects ragged rows and missing files") {
    auto path = testutil::write_temp_file("ragged.csv", "x,y\na,b\nc\n");
    REQUIRE_THROWS_AS(load_csv(path, {ColumnKind::categorical, ColumnKind::categorical}, true),
                      data_error);
    REQUIRE_THROWS_AS(load_csv("/nonexistent/nope.csv", {ColumnKind::categorical}, true),
                      io_error);
}

TEST_CASE("load_csv honours quoted fields") {
    auto path = testutil::write_temp_file("quoted.csv", "x\n\"a,b\"\n\"say \"\"hi\"\"\"\n");
    auto table = load_csv(path, {ColumnKind::categorical}, true);
    REQUIRE(table.columns[0].labels == std::vector<std::string>{"a,b", "say \"hi\""});
}

TEST_CASE("equal-frequency cuts on 1..10 with 5 bins") {
    std::vector<double> values;
    for (int i = 1; i <= 10; ++i) values.push_back(i);
    auto res = discretize_equal_frequency(values, 5);
    REQUIRE(res.cut_points == std::vector<double>{2, 4, 6, 8});
    REQUIRE_FALSE(res.degenerate);
    std::vector<int> counts(5, 0);
    for (int c : res.codes) counts[c]++;
    for (int b = 0; b < 5; ++b) REQUIRE(counts[b] == 2);
}

TEST_CASE("equal-frequency on 1..4 with 2 bins") {
    auto res = discretize_equal_frequency({1, 2, 3, 4}, 2);
    REQUIRE(res.cut_points == std::vector<double>{2});
    REQUIRE(res.codes == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("equal-frequency with no variation is a degenerate error") {
    REQUIRE_THROWS_AS(discretize_equal_frequency({7, 7, 7, 7}, 5), data_error);
}

TEST_CASE("equal-frequency collapses duplicate cuts and reports degeneracy") {
    // 3 distinct values, 5 requested bins
    auto res = discretize_equal_frequency({1, 1, 2, 2, 3, 3}, 5);
    REQUIRE(res.degenerate);
    REQUIRE(res.effective_bins < 5);
    REQUIRE(res.effective_bins >= 2);
}

TEST_CASE("equal-frequency property: tie-free bins differ by at most one") {
    auto rng = make_rng(404);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 11 + static_cast<int>(unif(rng) * 200);
        int bins = 2 + static_cast<int>(unif(rng) * 6);
        std::set<double> distinct;
        while (static_cast<int>(distinct.size()) < n) distinct.insert(unif(rng));
        std::vector<double> values(distinct.begin(), distinct.end());
        std::shuffle(values.begin(), values.end(), rng);
        auto res = discretize_equal_frequency(values, bins);
        REQUIRE(res.effective_bins == bins);
        std::vector<int> counts(bins, 0);
        for (int c : res.codes) counts[c]++;
        for (int b = 0; b < bins; ++b) {
            REQUIRE(counts[b] >= n / bins);
            REQUIRE(counts[b] <= (n + bins - 1) / bins);
        }
    }
}

TEST_CASE("decoding codes through labels reproduces the original tokens") {
    auto path = testutil::write_temp_file("roundtrip.csv", "x,y\nred,small\nblue,big\nred,big\n");
    auto table = load_csv(path, {ColumnKind::categorical, ColumnKind::categorical}, true);
    auto ds = make_dataset(table, 5);
    REQUIRE(ds.decode(0, 0) == "red");
    REQUIRE(ds.decode(1, 0) == "blue");
    REQUIRE(ds.decode(2, 0) == "red");
    REQUIRE(ds.decode(0, 1) == "small");
    REQUIRE(ds.decode(2, 1) == "big");
}

static Dataset toy_dataset(int n_rows) {
    Dataset ds;
    ds.variables = {{"a", 2, {"0", "1"}}, {"b", 3, {"0", "1", "2"}}};
    ds.rows.resize(n_rows, 2);
    for (int i = 0; i < n_rows; ++i) {
        ds.rows(i, 0) = i % 2;
        ds.rows(i, 1) = i % 3;
    }
    return ds;
}

TEST_CASE("subsample with n = n_rows leaves an empty test set") {
    auto ds = toy_dataset(10);
    auto split = subsample(ds, 10, 7);
    REQUIRE(split.train.n_rows() == 10);
    REQUIRE(split.test.n_rows() == 0);
}

TEST_CASE("subsample is deterministic per seed and partitions the rows") {
    auto ds = toy_dataset(100);
    auto s1 = subsample(ds, 20, 99);
    auto s2 = subsample(ds, 20, 99);
    REQUIRE(s1.train.rows == s2.train.rows);
    REQUIRE(s1.test.rows == s2.test.rows);
    REQUIRE(s1.train.n_rows() == 20);
    REQUIRE(s1.test.n_rows() == 80);

    // disjoint index sets that cover everything: count row multiset
    std::multiset<std::pair<int, int>> seen;
    for (int i = 0; i < s1.train.n_rows(); ++i)
        seen.insert({s1.train.code(i, 0), s1.train.code(i, 1)});
    for (int i = 0; i < s1.test.n_rows(); ++i)
        seen.insert({s1.test.code(i, 0), s1.test.code(i, 1)});
    std::multiset<std::pair<int, int>> all;
    for (int i = 0; i < ds.n_rows(); ++i) all.insert({ds.code(i, 0), ds.code(i, 1)});
    REQUIRE(seen == all);
}

TEST_CASE("subsample rejects n larger than the dataset") {
    auto ds = toy_dataset(5);
    REQUIRE_THROWS_AS(subsample(ds, 6, 1), data_error);
}

TEST_CASE("subsample caps the test part at 1000 when asked") {
    auto ds = toy_dataset(1500);
    auto split = subsample(ds, 100, 3, /*cap_test=*/true);
    REQUIRE(split.train.n_rows() == 100);
    REQUIRE(split.test.n_rows() == 1000);
}

TEST_CASE("subsample rejects non-positive n") {
    auto ds = toy_dataset(5);
    REQUIRE_THROWS_AS(subsample(ds, 0, 1), config_error);
}

TEST_CASE("discretize rejects fewer than two bins") {
    REQUIRE_THROWS_AS(discretize_equal_frequency({1, 2, 3}, 1), config_error);
}

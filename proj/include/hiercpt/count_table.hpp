// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hiercpt/common.hpp"
#include "hiercpt/dataset.hpp"

namespace hiercpt {

// Sufficient statistics of one child variable against a joint parent
// configuration set: counts(x, y) with column totals n_y. Parent
// configurations with no observations stay as explicit zero columns.
struct CountTable {
    int r = 0;  // child cardinality
    int q = 1;  // number of joint parent configurations
    Eigen::MatrixXi counts;           // r x q
    Eigen::VectorXi col_totals;       // length q
    std::vector<int> parent_cards;    // ordered parent cardinalities

    int n_total() const { return col_totals.sum(); }
};

// Mixed-radix rank of a joint parent state, last parent varying fastest.
inline int parent_config_index(const std::vector<int>& states, const std::vector<int>& cards) {
    if (states.size() != cards.size())
        throw data_error("parent_config_index: states/cards size mismatch");
    long long rank = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i] < 0 || states[i] >= cards[i])
            throw data_error("parent_config_index: state " + std::to_string(states[i]) +
                             " out of range [0," + std::to_string(cards[i]) + ")");
        rank = rank * cards[i] + states[i];
    }
    return static_cast<int>(rank);
}

inline CountTable make_count_table(int r, const std::vector<int>& parent_cards) {
    CountTable ct;
    ct.r = r;
    ct.parent_cards = parent_cards;
    long long q = 1;
    for (int c : parent_cards) q *= c;
    ct.q = static_cast<int>(q);
    ct.counts = Eigen::MatrixXi::Zero(ct.r, ct.q);
    ct.col_totals = Eigen::VectorXi::Zero(ct.q);
    return ct;
}

// Tallies n_xy for one child against a parent set.
inline CountTable count_table(const Dataset& ds, int child, const std::vector<int>& parents) {
    if (child < 0 || child >= ds.n_vars()) throw data_error("count_table: bad child id");
    std::set<int> seen;
    for (int p : parents) {
        if (p < 0 || p >= ds.n_vars()) throw data_error("count_table: bad parent id");
        if (p == child) throw data_error("count_table: child listed as its own parent");
        if (!seen.insert(p).second) throw data_error("count_table: duplicate parent id");
    }
    std::vector<int> cards;
    for (int p : parents) cards.push_back(ds.variables[p].cardinality);
    auto ct = make_count_table(ds.variables[child].cardinality, cards);

    std::vector<int> states(parents.size());
    for (int i = 0; i < ds.n_rows(); ++i) {
        for (std::size_t j = 0; j < parents.size(); ++j) states[j] = ds.code(i, parents[j]);
        int y = parent_config_index(states, cards);
        int x = ds.code(i, child);
        ct.counts(x, y) += 1;
        ct.col_totals(y) += 1;
    }
    return ct;
}

// Debug serialization: rows = child states, columns = parent-config ranks.
inline void write_count_table_csv(std::ostream& out, const CountTable& ct) {
    out << "x";
    for (int y = 0; y < ct.q; ++y) out << ",y" << y;
    out << '\n';
    for (int x = 0; x < ct.r; ++x) {
        out << x;
        for (int y = 0; y < ct.q; ++y) out << ',' << ct.counts(x, y);
        out << '\n';
    }
}

}  // namespace hiercpt

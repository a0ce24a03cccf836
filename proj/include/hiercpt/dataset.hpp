// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hiercpt/common.hpp"
#include "hiercpt/csv.hpp"
#include "hiercpt/rng.hpp"

namespace hiercpt {

enum class ColumnKind { categorical, numeric };

struct VariableMeta {
    std::string name;
    int cardinality = 0;
    std::vector<std::string> labels;  // one per state, unique
};

// Fully encoded discrete dataset. Immutable after construction; every cell
// holds a state code in [0, cardinality) of its variable.
struct Dataset {
    std::vector<VariableMeta> variables;
    Eigen::MatrixXi rows;  // n_rows x n_vars

    int n_rows() const { return static_cast<int>(rows.rows()); }
    int n_vars() const { return static_cast<int>(variables.size()); }
    int code(int row, int var) const { return rows(row, var); }
    const std::string& decode(int row, int var) const {
        return variables[var].labels[rows(row, var)];
    }
    int var_index(const std::string& name) const {
        for (int i = 0; i < n_vars(); ++i)
            if (variables[i].name == name) return i;
        throw data_error("unknown variable: " + name);
    }
};

// Staging result of load_csv: categorical columns already encoded,
// numeric columns kept raw until discretization.
struct CsvTable {
    struct Column {
        std::string name;
        ColumnKind kind = ColumnKind::categorical;
        std::vector<int> codes;           // categorical only
        std::vector<std::string> labels;  // categorical only, first-appearance order
        std::vector<double> values;       // numeric only
    };
    std::vector<Column> columns;
    int n_rows = 0;
    int dropped_rows = 0;  // rows containing an empty (missing) field
};

// Loads a CSV file. `kinds` declares one kind per column; rows with any
// empty field are dropped and counted. Categorical levels are encoded by
// first appearance.
inline CsvTable load_csv(const std::string& path, const std::vector<ColumnKind>& kinds,
                         bool header) {
    auto raw = read_csv(path);
    CsvTable table;
    const std::size_t n_cols = kinds.size();
    std::size_t first_data = 0;
    std::vector<std::string> names;
    if (header) {
        if (raw.empty()) throw data_error(path + ": header expected but file is empty");
        if (raw[0].size() != n_cols)
            throw data_error(path + ": schema declares " + std::to_string(n_cols) +
                             " columns, file has " + std::to_string(raw[0].size()));
        names = raw[0];
        first_data = 1;
    } else {
        for (std::size_t c = 0; c < n_cols; ++c) names.push_back("V" + std::to_string(c));
    }
    if (!raw.empty() && raw[0].size() != n_cols)
        throw data_error(path + ": schema declares " + std::to_string(n_cols) +
                         " columns, file has " + std::to_string(raw[0].size()));

    table.columns.resize(n_cols);
    std::vector<std::map<std::string, int>> code_of(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
        table.columns[c].name = names[c];
        table.columns[c].kind = kinds[c];
    }
    for (std::size_t rix = first_data; rix < raw.size(); ++rix) {
        const auto& fields = raw[rix];
        bool missing = std::any_of(fields.begin(), fields.end(),
                                   [](const std::string& f) { return f.empty(); });
        if (missing) {
            ++table.dropped_rows;
            continue;
        }
        // validate numeric tokens before committing any field of this row
        std::vector<double> parsed(n_cols, 0.0);
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (kinds[c] == ColumnKind::numeric) {
                try {
                    std::size_t pos = 0;
                    parsed[c] = std::stod(fields[c], &pos);
                    if (pos != fields[c].size()) throw std::invalid_argument(fields[c]);
                } catch (const std::exception&) {
                    throw data_error(path + ": non-numeric token '" + fields[c] +
                                     "' in numeric column " + names[c]);
                }
            }
        }
        for (std::size_t c = 0; c < n_cols; ++c) {
            auto& col = table.columns[c];
            if (kinds[c] == ColumnKind::categorical) {
                auto [it, inserted] = code_of[c].try_emplace(fields[c], static_cast<int>(col.labels.size()));
                if (inserted) col.labels.push_back(fields[c]);
                col.codes.push_back(it->second);
            } else {
                col.values.push_back(parsed[c]);
            }
        }
        ++table.n_rows;
    }
    return table;
}

struct DiscretizeResult {
    std::vector<int> codes;
    std::vector<double> cut_points;  // deduplicated, ascending
    int effective_bins = 0;          // may be < requested when values tie at cuts
    bool degenerate = false;         // effective_bins < requested bins
};

// Equal-frequency binning. Cut point k (k = 1..bins-1) is the order
// statistic at index ceil(k*n/bins); values fall in the half-open bin
// (lower, upper], lowest bin closed below. Duplicate cut points collapse.
inline DiscretizeResult discretize_equal_frequency(const std::vector<double>& values, int bins) {
    if (bins < 2) throw config_error("discretize: bins must be >= 2");
    if (values.empty()) throw data_error("discretize: empty value list");
    const int n = static_cast<int>(values.size());
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    DiscretizeResult res;
    for (int k = 1; k < bins; ++k) {
        int ix = static_cast<int>(std::ceil(static_cast<double>(k) * n / bins));
        ix = std::clamp(ix, 1, n);
        double cut = sorted[ix - 1];
        if (cut >= sorted[n - 1]) continue;  // would leave the top bin empty
        if (res.cut_points.empty() || cut > res.cut_points.back()) res.cut_points.push_back(cut);
    }
    res.effective_bins = static_cast<int>(res.cut_points.size()) + 1;
    res.degenerate = res.effective_bins < bins;
    if (res.effective_bins < 2)
        throw data_error("discretize: no variation in values (single effective bin)");

    res.codes.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        // bin index = number of cut points strictly below the value
        int b = static_cast<int>(std::lower_bound(res.cut_points.begin(), res.cut_points.end(),
                                                  values[i]) -
                                 res.cut_points.begin());
        res.codes[i] = b;
    }
    return res;
}

struct DiscretizedVariable {
    std::string name;
    std::vector<double> cut_points;
    bool degenerate = false;
};

// Finalizes a staged CsvTable into a Dataset: numeric columns are
// discretized into `bins` equal-frequency bins, categorical columns pass
// through. Cut points per numeric variable are reported for the sidecar.
inline Dataset make_dataset(const CsvTable& table, int bins,
                            std::vector<DiscretizedVariable>* discretized = nullptr) {
    Dataset ds;
    const int n_rows = table.n_rows;
    const int n_cols = static_cast<int>(table.columns.size());
    ds.rows.resize(n_rows, n_cols);
    for (int c = 0; c < n_cols; ++c) {
        const auto& col = table.columns[c];
        VariableMeta meta;
        meta.name = col.name;
        if (col.kind == ColumnKind::categorical) {
            meta.labels = col.labels;
            meta.cardinality = static_cast<int>(col.labels.size());
            for (int i = 0; i < n_rows; ++i) ds.rows(i, c) = col.codes[i];
        } else {
            auto disc = discretize_equal_frequency(col.values, bins);
            const auto& cuts = disc.cut_points;
            for (int b = 0; b < disc.effective_bins; ++b) {
                if (b == 0)
                    meta.labels.push_back("<=" + format_double(cuts[0]));
                else if (b == disc.effective_bins - 1)
                    meta.labels.push_back(">" + format_double(cuts[b - 1]));
                else
                    meta.labels.push_back("(" + format_double(cuts[b - 1]) + "," +
                                          format_double(cuts[b]) + "]");
            }
            meta.cardinality = disc.effective_bins;
            for (int i = 0; i < n_rows; ++i) ds.rows(i, c) = disc.codes[i];
            if (discretized)
                discretized->push_back({col.name, disc.cut_points, disc.degenerate});
        }
        if (n_rows > 0 && meta.cardinality < 2)
            throw data_error("variable " + meta.name + " has cardinality " +
                             std::to_string(meta.cardinality) + " after ingestion");
        ds.variables.push_back(std::move(meta));
    }
    return ds;
}

struct Split {
    Dataset train;
    Dataset test;
};

// Seeded uniform train/test split without replacement. Row order within
// each part follows the original dataset. When cap_test is set the test
// part is reduced to at most 1000 uniformly drawn rows.
inline Split subsample(const Dataset& ds, int n, std::uint64_t seed, bool cap_test = false) {
    if (n > ds.n_rows()) throw data_error("subsample: n exceeds dataset size");
    if (n < 1) throw config_error("subsample: n must be positive");
    auto rng = make_rng(seed);
    auto picked = sample_without_replacement(rng, ds.n_rows(), n);
    std::vector<bool> in_train(ds.n_rows(), false);
    for (int ix : picked) in_train[ix] = true;

    std::vector<int> test_ix;
    for (int i = 0; i < ds.n_rows(); ++i)
        if (!in_train[i]) test_ix.push_back(i);
    if (cap_test && static_cast<int>(test_ix.size()) > 1000) {
        auto keep = sample_without_replacement(rng, static_cast<int>(test_ix.size()), 1000);
        std::sort(keep.begin(), keep.end());
        std::vector<int> capped;
        capped.reserve(1000);
        for (int k : keep) capped.push_back(test_ix[k]);
        test_ix = std::move(capped);
    }

    auto take = [&](const std::vector<int>& ix) {
        Dataset part;
        part.variables = ds.variables;
        part.rows.resize(static_cast<int>(ix.size()), ds.n_vars());
        for (std::size_t i = 0; i < ix.size(); ++i) part.rows.row(static_cast<int>(i)) = ds.rows.row(ix[i]);
        return part;
    };
    std::sort(picked.begin(), picked.end());
    return {take(picked), take(test_ix)};
}

}  // namespace hiercpt

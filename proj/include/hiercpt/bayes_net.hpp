// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hiercpt/common.hpp"
#include "hiercpt/count_table.hpp"
#include "hiercpt/dataset.hpp"
#include "hiercpt/estimators.hpp"
#include "hiercpt/hier_posterior.hpp"

namespace hiercpt {

// Fixed network structure; node ids align with Dataset variables.
struct Dag {
    std::vector<std::string> names;          // optional, aligned with nodes
    std::vector<std::vector<int>> parents;   // per-node ordered parent ids

    int n_nodes() const { return static_cast<int>(parents.size()); }
};

// Kahn's algorithm; throws if the graph has a cycle or bad ids.
inline std::vector<int> topological_order(const Dag& dag) {
    const int n = dag.n_nodes();
    std::vector<int> indeg(n, 0);
    std::vector<std::vector<int>> children(n);
    for (int i = 0; i < n; ++i) {
        std::vector<int> seen;
        for (int p : dag.parents[i]) {
            if (p < 0 || p >= n) throw data_error("dag: parent id out of range");
            if (p == i) throw data_error("dag: node is its own parent");
            if (std::find(seen.begin(), seen.end(), p) != seen.end())
                throw data_error("dag: duplicate parent");
            seen.push_back(p);
            children[p].push_back(i);
            ++indeg[i];
        }
    }
    std::vector<int> order;
    std::vector<int> ready;
    for (int i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push_back(i);
    while (!ready.empty()) {
        int v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (int c : children[v])
            if (--indeg[c] == 0) ready.push_back(c);
    }
    if (static_cast<int>(order.size()) != n) throw data_error("dag: cycle detected");
    return order;
}

// DAG file: one line per node, `name | parent1,parent2`. Line order
// defines node ids; parents must refer to names in the file.
inline Dag parse_dag_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open dag file: " + path);
    Dag dag;
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> parent_names;
    std::string line;
    auto trim = [](std::string s) {
        auto issp = [](unsigned char c) { return std::isspace(c); };
        while (!s.empty() && issp(s.front())) s.erase(s.begin());
        while (!s.empty() && issp(s.back())) s.pop_back();
        return s;
    };
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto bar = line.find('|');
        std::string name = trim(bar == std::string::npos ? line : line.substr(0, bar));
        if (name.empty()) throw data_error(path + ": empty node name");
        names.push_back(name);
        std::vector<std::string> ps;
        if (bar != std::string::npos) {
            std::stringstream ss(line.substr(bar + 1));
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                tok = trim(tok);
                if (!tok.empty()) ps.push_back(tok);
            }
        }
        parent_names.push_back(std::move(ps));
    }
    dag.names = names;
    dag.parents.resize(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (const auto& pname : parent_names[i]) {
            auto it = std::find(names.begin(), names.end(), pname);
            if (it == names.end())
                throw data_error(path + ": unknown parent name '" + pname + "'");
            dag.parents[i].push_back(static_cast<int>(it - names.begin()));
        }
    }
    topological_order(dag);  // validates acyclicity
    return dag;
}

inline void write_dag_file(std::ostream& out, const Dag& dag) {
    for (int i = 0; i < dag.n_nodes(); ++i) {
        out << (dag.names.empty() ? "V" + std::to_string(i) : dag.names[i]) << " |";
        for (std::size_t j = 0; j < dag.parents[i].size(); ++j) {
            int p = dag.parents[i][j];
            out << (j ? "," : " ")
                << (dag.names.empty() ? "V" + std::to_string(p) : dag.names[p]);
        }
        out << '\n';
    }
}

// Remaps a named DAG onto a dataset's variable order.
inline Dag align_dag(const Dag& dag, const Dataset& ds) {
    if (dag.n_nodes() != ds.n_vars())
        throw data_error("dag/dataset node count mismatch");
    std::vector<int> to_ds(dag.n_nodes());
    for (int i = 0; i < dag.n_nodes(); ++i) to_ds[i] = ds.var_index(dag.names[i]);
    Dag out;
    out.names.resize(ds.n_vars());
    out.parents.resize(ds.n_vars());
    for (int i = 0; i < dag.n_nodes(); ++i) {
        out.names[to_ds[i]] = dag.names[i];
        for (int p : dag.parents[i]) out.parents[to_ds[i]].push_back(to_ds[p]);
    }
    return out;
}

struct BayesNet {
    Dag dag;
    std::vector<CptEstimate> cpts;            // one per node, r_i x q_i
    std::vector<AlphaPosterior> alpha_posts;  // filled for hierarchical fits
};

struct EstimatorSpec {
    Method method = Method::BAYES;
    double s = 1.0;            // ignored for ML; for HIER, used only when !s_auto
    bool s_auto = true;        // HIER default: s = child cardinality
    int n_samples = 100000;    // HIER
    std::uint64_t seed = 0;    // HIER
    // Network fits keep a lower floor than the standalone default: at
    // large n the per-node posterior concentrates and the prior proposal
    // thins out, yet the posterior tightness makes a small absolute ESS
    // harmless for the downstream CPT (the alpha weight is s/(n_y+s)).
    double ess_floor = 1e-4;   // HIER

    static EstimatorSpec ml() { return {Method::ML, 0.0, false, 0, 0, 0.0}; }
    static EstimatorSpec bdeu(double s) { return {Method::BAYES, s, false, 0, 0, 0.0}; }
    static EstimatorSpec hier(std::uint64_t seed, int n_samples = 100000) {
        EstimatorSpec spec;
        spec.method = Method::HIER;
        spec.s_auto = true;
        spec.seed = seed;
        spec.n_samples = n_samples;
        return spec;
    }
    std::string tag() const {
        if (method == Method::ML) return "ml";
        if (method == Method::HIER) return s_auto ? "hier" : "hier-s" + format_double(s);
        return "bdeu-s" + format_double(s);
    }
};

// Fits one CPT per node with the selected estimator. Hierarchical fits use
// s = r_i and a ones hyper-parameter vector per node unless overridden.
inline BayesNet fit_cpts(const Dag& dag, const Dataset& ds, const EstimatorSpec& spec) {
    if (dag.n_nodes() != ds.n_vars())
        throw data_error("fit_cpts: dag and dataset disagree on node count");
    topological_order(dag);
    BayesNet net;
    net.dag = dag;
    net.cpts.reserve(dag.n_nodes());
    for (int i = 0; i < dag.n_nodes(); ++i) {
        const CountTable ct = count_table(ds, i, dag.parents[i]);
        try {
            switch (spec.method) {
                case Method::ML:
                    net.cpts.push_back(ml_estimate(ct));
                    break;
                case Method::BAYES:
                    net.cpts.push_back(bdeu_estimate(ct, spec.s));
                    break;
                case Method::HIER: {
                    HierConfig cfg = default_hier_config(ct.r, derive_seed(spec.seed, i),
                                                         spec.n_samples);
                    if (!spec.s_auto) cfg.s = spec.s;
                    cfg.ess_floor = spec.ess_floor;
                    auto hier = hierarchical_estimate(ct, cfg);
                    CptEstimate est;
                    est.theta = hier.theta;
                    est.method = Method::HIER;
                    est.s = cfg.s;
                    est.alpha = hier.alpha_post.mean;
                    est.undefined_cols.assign(ct.q, false);
                    net.cpts.push_back(std::move(est));
                    net.alpha_posts.resize(dag.n_nodes());
                    net.alpha_posts[i] = hier.alpha_post;
                    break;
                }
                default:
                    throw config_error("fit_cpts: unsupported estimator");
            }
        } catch (const numeric_error& e) {
            throw numeric_error("fit_cpts: node " + std::to_string(i) + " (" +
                                (dag.names.empty() ? "V" + std::to_string(i) : dag.names[i]) +
                                "): " + e.what());
        }
    }
    return net;
}

inline int parent_rank_of_row(const Dataset& ds, const Dag& dag, int node, int row) {
    std::vector<int> states, cards;
    for (int p : dag.parents[node]) {
        states.push_back(ds.code(row, p));
        cards.push_back(ds.variables[p].cardinality);
    }
    return parent_config_index(states, cards);
}

// Total log-likelihood of all rows under the fitted network.
inline double joint_log_likelihood(const BayesNet& net, const Dataset& ds) {
    if (net.dag.n_nodes() != ds.n_vars())
        throw data_error("joint_log_likelihood: variable count mismatch");
    for (const auto& cpt : net.cpts)
        if (cpt.has_undefined())
            throw data_error("joint_log_likelihood: net contains an undefined ML column");
    double total = 0.0;
    for (int row = 0; row < ds.n_rows(); ++row) {
        for (int i = 0; i < net.dag.n_nodes(); ++i) {
            int y = parent_rank_of_row(ds, net.dag, i, row);
            total += std::log(net.cpts[i].theta(ds.code(row, i), y));
        }
    }
    return total;
}

// Class posterior for one instance with every non-class variable observed.
// Scores accumulate in log space and are normalized at the end.
inline Eigen::VectorXd classify(const BayesNet& net, const std::vector<int>& row_codes,
                                int class_var) {
    const int n = net.dag.n_nodes();
    if (static_cast<int>(row_codes.size()) != n)
        throw data_error("classify: instance arity mismatch");
    const int n_classes = static_cast<int>(net.cpts[class_var].theta.rows());
    Eigen::VectorXd log_score(n_classes);
    std::vector<int> codes = row_codes;
    for (int c = 0; c < n_classes; ++c) {
        codes[class_var] = c;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            std::vector<int> states, cards;
            for (int p : net.dag.parents[i]) {
                states.push_back(codes[p]);
                cards.push_back(static_cast<int>(net.cpts[p].theta.rows()));
            }
            int y = parent_config_index(states, cards);
            acc += std::log(net.cpts[i].theta(codes[i], y));
        }
        log_score[c] = acc;
    }
    Eigen::VectorXd shifted = (log_score.array() - log_score.maxCoeff()).exp();
    return shifted / shifted.sum();
}

struct EvalReport {
    double accuracy = 0.0;
    double auc = 0.0;  // macro one-vs-rest, tied scores count 1/2
    double log_lik = 0.0;
    int n_test = 0;
    int skipped_auc_classes = 0;  // classes absent from the test set
};

// One-vs-rest AUC by the midrank statistic.
inline double auc_rank_statistic(const std::vector<double>& scores,
                                 const std::vector<bool>& positive) {
    const int n = static_cast<int>(scores.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return scores[a] < scores[b]; });
    std::vector<double> rank(n);
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        double mid = (i + j) / 2.0 + 1.0;  // 1-based midrank
        for (int k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    double rank_sum = 0.0;
    long n_pos = 0;
    for (int k = 0; k < n; ++k)
        if (positive[k]) {
            rank_sum += rank[k];
            ++n_pos;
        }
    long n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw data_error("auc: class absent");
    return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (static_cast<double>(n_pos) * n_neg);
}

inline EvalReport evaluate(const BayesNet& net, const Dataset& test, int class_var) {
    if (test.n_rows() == 0) throw data_error("evaluate: empty test set");
    const int n_classes = static_cast<int>(net.cpts[class_var].theta.rows());
    EvalReport report;
    report.n_test = test.n_rows();
    Eigen::MatrixXd posteriors(test.n_rows(), n_classes);
    int correct = 0;
    std::vector<int> codes(test.n_vars());
    for (int row = 0; row < test.n_rows(); ++row) {
        for (int v = 0; v < test.n_vars(); ++v) codes[v] = test.code(row, v);
        Eigen::VectorXd post = classify(net, codes, class_var);
        posteriors.row(row) = post.transpose();
        int argmax = 0;
        for (int c = 1; c < n_classes; ++c)
            if (post[c] > post[argmax]) argmax = c;  // ties keep the lowest index
        if (argmax == test.code(row, class_var)) ++correct;
    }
    report.accuracy = static_cast<double>(correct) / test.n_rows();

    double auc_sum = 0.0;
    int auc_classes = 0;
    for (int c = 0; c < n_classes; ++c) {
        std::vector<double> scores(test.n_rows());
        std::vector<bool> positive(test.n_rows());
        for (int row = 0; row < test.n_rows(); ++row) {
            scores[row] = posteriors(row, c);
            positive[row] = test.code(row, class_var) == c;
        }
        try {
            auc_sum += auc_rank_statistic(scores, positive);
            ++auc_classes;
        } catch (const data_error&) {
            ++report.skipped_auc_classes;
        }
    }
    if (auc_classes == 0) throw data_error("evaluate: no class present in test set");
    report.auc = auc_sum / auc_classes;
    report.log_lik = joint_log_likelihood(net, test);
    return report;
}

// Draws rows from a fully specified network (ancestral sampling).
inline Dataset sample_dataset(const BayesNet& net, int n_rows, std::uint64_t seed) {
    auto order = topological_order(net.dag);
    auto rng = make_rng(seed);
    const int n_vars = net.dag.n_nodes();
    Dataset ds;
    ds.variables.resize(n_vars);
    for (int i = 0; i < n_vars; ++i) {
        auto& meta = ds.variables[i];
        meta.name = net.dag.names.empty() ? "V" + std::to_string(i) : net.dag.names[i];
        meta.cardinality = static_cast<int>(net.cpts[i].theta.rows());
        for (int x = 0; x < meta.cardinality; ++x) meta.labels.push_back(std::to_string(x));
    }
    ds.rows.resize(n_rows, n_vars);
    std::vector<int> codes(n_vars, 0);
    for (int row = 0; row < n_rows; ++row) {
        for (int i : order) {
            std::vector<int> states, cards;
            for (int p : net.dag.parents[i]) {
                states.push_back(codes[p]);
                cards.push_back(static_cast<int>(net.cpts[p].theta.rows()));
            }
            int y = parent_config_index(states, cards);
            codes[i] = categorical_draw(rng, net.cpts[i].theta.col(y));
        }
        for (int i = 0; i < n_vars; ++i) ds.rows(row, i) = codes[i];
    }
    return ds;
}

// Ground-truth network for synthetic experiments: per node, a shared mean
// vector is drawn from Dirichlet(concentration * ones) and the columns
// i.i.d. from Dirichlet(s * mean) with s = r, i.e. the column-coupled
// generative model. Concentrations below 1 give skewed conditionals.
inline BayesNet random_hier_net(const Dag& dag, const std::vector<int>& cardinalities,
                                std::uint64_t seed, double concentration = 1.0) {
    if (static_cast<int>(cardinalities.size()) != dag.n_nodes())
        throw data_error("random_hier_net: cardinality list size mismatch");
    topological_order(dag);
    auto rng = make_rng(seed);
    BayesNet net;
    net.dag = dag;
    for (int i = 0; i < dag.n_nodes(); ++i) {
        int r = cardinalities[i];
        long long q = 1;
        for (int p : dag.parents[i]) q *= cardinalities[p];
        Eigen::VectorXd alpha =
            dirichlet_draw(rng, Eigen::VectorXd::Constant(r, concentration));
        CptEstimate cpt;
        cpt.method = Method::HIER;
        cpt.s = static_cast<double>(r);
        cpt.alpha = alpha;
        cpt.theta.resize(r, static_cast<int>(q));
        for (int y = 0; y < q; ++y)
            cpt.theta.col(y) = dirichlet_draw(rng, static_cast<double>(r) * alpha);
        cpt.undefined_cols.assign(static_cast<int>(q), false);
        net.cpts.push_back(std::move(cpt));
    }
    if (net.dag.names.empty())
        for (int i = 0; i < dag.n_nodes(); ++i) net.dag.names.push_back("V" + std::to_string(i));
    return net;
}

}  // namespace hiercpt

// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <string>
#include <vector>

#include "hiercpt/bayes_net.hpp"
#include "hiercpt/common.hpp"
#include "hiercpt/dataset.hpp"
#include "hiercpt/parallel.hpp"
#include "hiercpt/tan.hpp"

namespace hiercpt {

// 6-node benchmark structure with rich parent sets, the regime where many
// parent configurations go unobserved at small n.
inline Dag joint_fixture_dag() {
    Dag dag;
    dag.names = {"V0", "V1", "V2", "V3", "V4", "V5"};
    dag.parents = {{}, {0}, {0, 1}, {1, 2}, {2, 3}, {3, 4}};
    return dag;
}

inline std::vector<int> joint_fixture_cards() { return {3, 3, 4, 3, 4, 3}; }

// Class node 0 plus a chain of five features, all features also children
// of the class: a ground-truth TAN.
inline Dag tan_fixture_dag() {
    Dag dag;
    dag.names = {"class", "F1", "F2", "F3", "F4", "F5"};
    dag.parents = {{}, {0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}};
    return dag;
}

inline std::vector<int> tan_fixture_cards() { return {3, 5, 5, 5, 5, 5}; }

struct LoglikRow {
    int n = 0;
    int rep = 0;
    std::string method;
    double log_lik = 0.0;
    int n_test = 0;
};

// Joint-distribution recovery on synthetic data: per repetition a fresh
// ground-truth network is drawn from the column-coupled model, a train
// set of n rows and a held-out test set are sampled, the CPTs are
// re-estimated by each method and scored by total test log-likelihood.
inline std::vector<LoglikRow> synthetic_loglik_experiment(
    const std::vector<int>& n_list, int reps, const std::vector<EstimatorSpec>& methods,
    int n_test, std::uint64_t seed, int jobs = 1) {
    const Dag dag = joint_fixture_dag();
    const auto cards = joint_fixture_cards();
    struct Task {
        int n, rep;
    };
    std::vector<Task> tasks;
    for (int n : n_list)
        for (int rep = 0; rep < reps; ++rep) tasks.push_back({n, rep});

    std::vector<std::vector<LoglikRow>> results(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), jobs, [&](int t) {
        const auto [n, rep] = tasks[t];
        std::uint64_t key = derive_seed(seed, static_cast<std::uint64_t>(n) * 1009 + rep);
        BayesNet truth = random_hier_net(dag, cards, derive_seed(key, 0));
        Dataset train = sample_dataset(truth, n, derive_seed(key, 1));
        Dataset test = sample_dataset(truth, n_test, derive_seed(key, 2));
        for (const auto& m : methods) {
            EstimatorSpec spec = m;
            if (spec.method == Method::HIER) spec.seed = derive_seed(key, 3);
            BayesNet net = fit_cpts(dag, train, spec);
            results[t].push_back({n, rep, m.tag(), joint_log_likelihood(net, test), n_test});
        }
    });
    std::vector<LoglikRow> rows;
    for (auto& part : results) rows.insert(rows.end(), part.begin(), part.end());
    return rows;
}

// Same protocol on a real dataset: subsample n training rows, test on the
// remainder, score the fixed structure refit by each method.
inline std::vector<LoglikRow> dataset_loglik_experiment(
    const Dataset& ds, const Dag& dag, const std::vector<int>& n_list, int reps,
    const std::vector<EstimatorSpec>& methods, std::uint64_t seed, int jobs = 1,
    bool cap_test = false) {
    struct Task {
        int n, rep;
    };
    std::vector<Task> tasks;
    for (int n : n_list)
        for (int rep = 0; rep < reps; ++rep) tasks.push_back({n, rep});
    std::vector<std::vector<LoglikRow>> results(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), jobs, [&](int t) {
        const auto [n, rep] = tasks[t];
        std::uint64_t key = derive_seed(seed, static_cast<std::uint64_t>(n) * 1009 + rep);
        auto split = subsample(ds, n, derive_seed(key, 1), cap_test);
        for (const auto& m : methods) {
            EstimatorSpec spec = m;
            if (spec.method == Method::HIER) spec.seed = derive_seed(key, 3);
            BayesNet net = fit_cpts(dag, split.train, spec);
            results[t].push_back(
                {n, rep, m.tag(), joint_log_likelihood(net, split.test), split.test.n_rows()});
        }
    });
    std::vector<LoglikRow> rows;
    for (auto& part : results) rows.insert(rows.end(), part.begin(), part.end());
    return rows;
}

struct ClassifyRow {
    int n = 0;
    int rep = 0;
    std::string method;
    double accuracy = 0.0;
    double auc = 0.0;
    int n_test = 0;
};

// Classification benchmark on synthetic data: ground-truth TAN per
// repetition, structure re-learned from a large pooled sample (the
// experiments keep structure fixed across methods), CPTs fit on the n-row
// train set, scored on a fresh test set.
inline std::vector<ClassifyRow> synthetic_classify_experiment(
    const std::vector<int>& n_list, int reps, const std::vector<EstimatorSpec>& methods,
    int n_test, std::uint64_t seed, int jobs = 1) {
    const Dag truth_dag = tan_fixture_dag();
    const auto cards = tan_fixture_cards();
    const int class_var = 0;
    struct Task {
        int n, rep;
    };
    std::vector<Task> tasks;
    for (int n : n_list)
        for (int rep = 0; rep < reps; ++rep) tasks.push_back({n, rep});

    std::vector<std::vector<ClassifyRow>> results(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), jobs, [&](int t) {
        const auto [n, rep] = tasks[t];
        std::uint64_t key = derive_seed(seed, static_cast<std::uint64_t>(n) * 2003 + rep);
        // skewed conditionals: the regime where a fixed uniform prior hurts
        BayesNet truth = random_hier_net(truth_dag, cards, derive_seed(key, 0), 0.5);
        // keep the class marginal away from degeneracy so every class shows
        // up in the test set and the per-class AUC is defined
        auto class_rng = make_rng(derive_seed(key, 9));
        truth.cpts[class_var].theta.col(0) =
            dirichlet_draw(class_rng, Eigen::VectorXd::Constant(cards[class_var], 10.0));
        Dataset pool = sample_dataset(truth, 4000, derive_seed(key, 1));
        Dag dag = learn_tan(pool, class_var);
        Dataset train = sample_dataset(truth, n, derive_seed(key, 2));
        Dataset test = sample_dataset(truth, n_test, derive_seed(key, 3));
        for (const auto& m : methods) {
            EstimatorSpec spec = m;
            if (spec.method == Method::HIER) spec.seed = derive_seed(key, 4);
            BayesNet net = fit_cpts(dag, train, spec);
            EvalReport ev = evaluate(net, test, class_var);
            results[t].push_back({n, rep, m.tag(), ev.accuracy, ev.auc, ev.n_test});
        }
    });
    std::vector<ClassifyRow> rows;
    for (auto& part : results) rows.insert(rows.end(), part.begin(), part.end());
    return rows;
}

// Real-dataset classification: TAN learned once from all rows (structure
// is not the object of study), then per repetition an n-row train set and
// a capped uniform test set.
inline std::vector<ClassifyRow> dataset_classify_experiment(
    const Dataset& ds, int class_var, const std::vector<int>& n_list, int reps,
    const std::vector<EstimatorSpec>& methods, std::uint64_t seed, int jobs = 1) {
    Dag dag = learn_tan(ds, class_var);
    struct Task {
        int n, rep;
    };
    std::vector<Task> tasks;
    for (int n : n_list)
        for (int rep = 0; rep < reps; ++rep) tasks.push_back({n, rep});
    std::vector<std::vector<ClassifyRow>> results(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), jobs, [&](int t) {
        const auto [n, rep] = tasks[t];
        std::uint64_t key = derive_seed(seed, static_cast<std::uint64_t>(n) * 2003 + rep);
        auto split = subsample(ds, n, derive_seed(key, 1), /*cap_test=*/true);
        for (const auto& m : methods) {
            EstimatorSpec spec = m;
            if (spec.method == Method::HIER) spec.seed = derive_seed(key, 4);
            BayesNet net = fit_cpts(dag, split.train, spec);
            EvalReport ev = evaluate(net, split.test, class_var);
            results[t].push_back({n, rep, m.tag(), ev.accuracy, ev.auc, ev.n_test});
        }
    });
    std::vector<ClassifyRow> rows;
    for (auto& part : results) rows.insert(rows.end(), part.begin(), part.end());
    return rows;
}

}  // namespace hiercpt

// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hiercpt/common.hpp"
#include "hiercpt/count_table.hpp"
#include "hiercpt/estimators.hpp"
#include "hiercpt/hier_posterior.hpp"
#include "hiercpt/parallel.hpp"
#include "hiercpt/rng.hpp"

namespace hiercpt {

// How the parent configuration of each observation is chosen.
// fixed_counts pins n_y (n/q observations per configuration, remainder
// round-robin), which is the conditioning regime of the closed forms;
// random draws Y from parent_dist.
enum class ParentMode { random, fixed_counts };

struct GenerativeSpec {
    int r = 2;
    int q = 1;
    double s_true = 1.0;
    Eigen::VectorXd alpha_true;   // length r, sums to 1, positive
    int n = 1;
    Eigen::VectorXd parent_dist;  // length q; empty = uniform
    ParentMode mode = ParentMode::random;

    void validate() const {
        if (r < 2 || q < 1) throw config_error("generative: need r >= 2, q >= 1");
        if (s_true <= 0.0) throw config_error("generative: s_true must be positive");
        if (alpha_true.size() != r) throw config_error("generative: alpha_true length != r");
        if ((alpha_true.array() <= 0.0).any())
            throw config_error("generative: alpha_true entries must be positive");
        if (std::abs(alpha_true.sum() - 1.0) > 1e-9)
            throw config_error("generative: alpha_true must sum to 1");
        if (n < 1) throw config_error("generative: n must be >= 1");
        if (parent_dist.size() != 0 && parent_dist.size() != q)
            throw config_error("generative: parent_dist length != q");
    }
};

struct GenerativeDraw {
    Eigen::MatrixXd theta_true;  // r x q, columns i.i.d. Dirichlet(s_true * alpha_true)
    CountTable ct;
};

// One draw from the generative model: column parameters from the shared
// Dirichlet, then n categorical observations.
inline GenerativeDraw sample_generative(const GenerativeSpec& spec, std::uint64_t seed) {
    spec.validate();
    auto rng = make_rng(seed);
    GenerativeDraw draw;
    draw.theta_true.resize(spec.r, spec.q);
    Eigen::VectorXd conc = spec.s_true * spec.alpha_true;
    for (int y = 0; y < spec.q; ++y) draw.theta_true.col(y) = dirichlet_draw(rng, conc);

    draw.ct = make_count_table(spec.r, {spec.q});

    if (spec.mode == ParentMode::fixed_counts) {
        for (int y = 0; y < spec.q; ++y) {
            int ny = spec.n / spec.q + (y < spec.n % spec.q ? 1 : 0);
            for (int k = 0; k < ny; ++k) {
                int x = categorical_draw(rng, draw.theta_true.col(y));
                draw.ct.counts(x, y) += 1;
            }
            draw.ct.col_totals(y) = ny;
        }
    } else {
        Eigen::VectorXd pd = spec.parent_dist.size()
                                 ? spec.parent_dist
                                 : Eigen::VectorXd::Constant(spec.q, 1.0 / spec.q);
        for (int k = 0; k < spec.n; ++k) {
            int y = categorical_draw(rng, pd);
            int x = categorical_draw(rng, draw.theta_true.col(y));
            draw.ct.counts(x, y) += 1;
            draw.ct.col_totals(y) += 1;
        }
    }
    return draw;
}

// Closed-form per-cell mean-squared error under the generative model with
// n_y held fixed. The Bayesian form carries the squared shrinkage factor
// (1-w)^2 on the bias term; the empirical oracle in the test suite pins
// that choice against the alternative reading.
inline double mse_closed_form(Method kind, int n_y, double s, double alpha_x, int r) {
    if (s <= 0.0) throw config_error("mse_closed_form: s must be positive");
    if (alpha_x <= 0.0 || alpha_x >= 1.0)
        throw config_error("mse_closed_form: alpha_x must lie in (0,1)");
    const double var_theta = (alpha_x - alpha_x * alpha_x) / (s + 1.0);
    switch (kind) {
        case Method::ML:
            if (n_y < 1) throw config_error("mse_closed_form: ML needs n_y >= 1");
            return s / n_y * var_theta;
        case Method::IDEAL: {
            // (w^2 s/n_y + (1-w)^2) var_theta with w = n_y/(n_y+s),
            // written without the 0/0 at n_y = 0; equals s/(n_y+s)*var_theta.
            const double d = n_y + s;
            return (n_y * s / (d * d) + s * s / (d * d)) * var_theta;
        }
        case Method::BAYES: {
            const double d = n_y + s;
            const double one_minus_w = s / d;
            const double bias = alpha_x - 1.0 / r;
            return mse_closed_form(Method::IDEAL, n_y, s, alpha_x, r) +
                   one_minus_w * one_minus_w * bias * bias;
        }
        default:
            throw config_error("mse_closed_form: kind must be ML, IDEAL or BAYES");
    }
}

using EstimatorFn = std::function<Eigen::MatrixXd(const CountTable&)>;

struct MseReport {
    Eigen::MatrixXd per_cell;  // r x q empirical MSE
    double average = 0.0;      // mean over cells
    double mc_se = 0.0;        // standard error of the average over replicates
    int replicates = 0;        // replicates that contributed
    int skipped = 0;           // estimator failures
    std::string estimator_tag;
};

// Monte-Carlo MSE: repeatedly draw (theta, counts) from the generative
// model, apply the estimator, and average squared errors per cell.
inline MseReport empirical_mse(const EstimatorFn& estimator, const GenerativeSpec& spec,
                               int replicates, std::uint64_t seed,
                               const std::string& tag = "") {
    spec.validate();
    if (replicates < 2) throw config_error("empirical_mse: replicates must be >= 2");
    MseReport report;
    report.estimator_tag = tag;
    report.per_cell = Eigen::MatrixXd::Zero(spec.r, spec.q);
    double sum_avg = 0.0, sum_avg2 = 0.0;
    for (int rep = 0; rep < replicates; ++rep) {
        auto draw = sample_generative(spec, derive_seed(seed, rep));
        Eigen::MatrixXd theta_hat;
        try {
            theta_hat = estimator(draw.ct);
        } catch (const error&) {
            ++report.skipped;
            continue;
        }
        Eigen::MatrixXd sq = (theta_hat - draw.theta_true).array().square();
        report.per_cell += sq;
        double avg = sq.mean();
        sum_avg += avg;
        sum_avg2 += avg * avg;
        ++report.replicates;
    }
    if (report.replicates < 2)
        throw numeric_error("empirical_mse: fewer than 2 usable replicates");
    report.per_cell /= report.replicates;
    report.average = report.per_cell.mean();
    double mean_avg = sum_avg / report.replicates;
    double var_avg = (sum_avg2 / report.replicates - mean_avg * mean_avg) *
                     report.replicates / (report.replicates - 1.0);
    report.mc_se = std::sqrt(std::max(var_avg, 0.0) / report.replicates);
    return report;
}

struct BenchmarkRow {
    int test = 1;
    int r = 0, q = 0, n = 0, repetition = 0;
    double mse_bayes = 0.0;
    double mse_hier = 0.0;
    double diff = 0.0;  // mse_bayes - mse_hier; positive favours the hierarchical fit
    double ess = 0.0;
    int n_samples = 0;
};

struct BenchmarkGrid {
    std::vector<int> r_list{2, 4, 6, 8};
    std::vector<int> q_list{2, 4, 6, 8};
    std::vector<int> n_list{20, 40, 80, 160, 320, 640};
};

// One repetition of the benchmark protocol: draw the generative prior
// mean (flat for test 1, near-uniform for test 2), generate a dataset,
// fit the Bayesian (s = r, uniform) and hierarchical (s = r, ones)
// estimators, and record the per-table average squared errors.
inline BenchmarkRow benchmark_repetition(int test, int r, int q, int n, int repetition,
                                         int n_samples, std::uint64_t task_seed) {
    auto rng = make_rng(task_seed);
    double conc = (test == 2) ? 1e6 : 1.0;
    Eigen::VectorXd alpha_true = dirichlet_draw(rng, Eigen::VectorXd::Constant(r, conc));

    GenerativeSpec spec;
    spec.r = r;
    spec.q = q;
    spec.s_true = static_cast<double>(r);
    spec.alpha_true = alpha_true;
    spec.n = n;
    spec.mode = ParentMode::random;
    auto draw = sample_generative(spec, derive_seed(task_seed, 1));

    auto bayes = bayes_estimate(draw.ct, static_cast<double>(r), uniform_alpha(r));

    HierConfig cfg = default_hier_config(r, derive_seed(task_seed, 2), n_samples);
    auto hier = hierarchical_estimate(draw.ct, cfg);

    BenchmarkRow row;
    row.test = test;
    row.r = r;
    row.q = q;
    row.n = n;
    row.repetition = repetition;
    row.mse_bayes = (bayes.theta - draw.theta_true).array().square().mean();
    row.mse_hier = (hier.theta - draw.theta_true).array().square().mean();
    row.diff = row.mse_bayes - row.mse_hier;
    row.ess = hier.alpha_post.ess;
    row.n_samples = hier.alpha_post.n_samples_used;
    return row;
}

// Full grid sweep; rows come back in a fixed (r, q, n, repetition) order
// regardless of the worker count.
inline std::vector<BenchmarkRow> run_mse_benchmark(int test, const BenchmarkGrid& grid,
                                                   int replicates, int n_samples,
                                                   std::uint64_t seed, int jobs = 1) {
    if (test != 1 && test != 2) throw config_error("mse benchmark: test must be 1 or 2");
    if (grid.r_list.empty() || grid.q_list.empty() || grid.n_list.empty())
        throw config_error("mse benchmark: empty grid");
    if (replicates < 1) throw config_error("mse benchmark: replicates must be >= 1");

    struct Task {
        int r, q, n, rep;
    };
    std::vector<Task> tasks;
    for (int r : grid.r_list)
        for (int q : grid.q_list)
            for (int n : grid.n_list)
                for (int rep = 0; rep < replicates; ++rep) tasks.push_back({r, q, n, rep});

    std::vector<BenchmarkRow> rows(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), jobs, [&](int i) {
        const auto& t = tasks[i];
        // seed keyed to the task description, not the task index, so
        // adding grid points does not reshuffle existing cells
        std::uint64_t key = derive_seed(seed, (((static_cast<std::uint64_t>(t.r) * 64 + t.q) *
                                                    4096 + t.n) * 1024 + t.rep) * 2 + test);
        rows[i] = benchmark_repetition(test, t.r, t.q, t.n, t.rep, n_samples, key);
    });
    return rows;
}

}  // namespace hiercpt

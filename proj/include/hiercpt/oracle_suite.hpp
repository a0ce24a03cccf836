// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "hiercpt/common.hpp"
#include "hiercpt/hier_posterior.hpp"
#include "hiercpt/mse_lab.hpp"
#include "hiercpt/quadrature.hpp"

namespace hiercpt {

// One sampler-vs-quadrature comparison: the importance-sampling posterior
// mean of alpha against the deterministic simplex integral, per coordinate.
struct OracleFixtureResult {
    int r = 0, q = 0, n = 0;
    double max_abs_diff = 0.0;   // worst coordinate of |IS mean - quadrature mean|
    double tolerance = 0.0;      // max(3 * worst MC-SE, 5e-3)
    double ess = 0.0;
    bool pass = false;
};

// Fixtures span r in {2,3}, q in {1,2,4}, n in {0,1,5,50}; counts come
// from the column-coupled generative model itself.
inline std::vector<OracleFixtureResult> run_oracle_suite(int n_samples, std::uint64_t seed,
                                                         int max_fixtures = 20) {
    std::vector<std::tuple<int, int, int>> combos;
    for (int r : {2, 3})
        for (int q : {1, 2, 4})
            for (int n : {0, 1, 5, 50}) combos.emplace_back(r, q, n);
    if (max_fixtures < static_cast<int>(combos.size()))
        combos.resize(max_fixtures);

    std::vector<OracleFixtureResult> results;
    int index = 0;
    for (auto [r, q, n] : combos) {
        CountTable ct;
        if (n == 0) {
            ct = make_count_table(r, {q});
        } else {
            auto rng = make_rng(derive_seed(seed, index));
            GenerativeSpec spec;
            spec.r = r;
            spec.q = q;
            spec.s_true = static_cast<double>(r);
            spec.alpha_true = dirichlet_draw(rng, Eigen::VectorXd::Ones(r));
            spec.n = n;
            ct = sample_generative(spec, derive_seed(seed, index + 1000)).ct;
        }
        HierConfig cfg = default_hier_config(r, derive_seed(seed, index + 2000), n_samples);
        auto is_post = alpha_posterior(ct, cfg);
        auto quad_post = alpha_posterior_quadrature(ct, cfg);

        OracleFixtureResult res;
        res.r = r;
        res.q = q;
        res.n = n;
        res.max_abs_diff = (is_post.mean - quad_post.mean).cwiseAbs().maxCoeff();
        res.tolerance = std::max(3.0 * is_post.mc_se.maxCoeff(), 5e-3);
        res.ess = is_post.ess;
        res.pass = res.max_abs_diff < res.tolerance;
        results.push_back(res);
        ++index;
    }
    return results;
}

}  // namespace hiercpt

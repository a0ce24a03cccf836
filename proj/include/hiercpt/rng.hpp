// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hiercpt/common.hpp"

namespace hiercpt {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Dirichlet(concentration) draw via normalized gammas. Redraws the rare
// boundary sample (a gamma that underflowed to zero) so the result is
// strictly interior.
inline Eigen::VectorXd dirichlet_draw(Rng& rng, const Eigen::VectorXd& concentration) {
    const auto r = concentration.size();
    Eigen::VectorXd g(r);
    while (true) {
        double total = 0.0;
        bool interior = true;
        for (Eigen::Index i = 0; i < r; ++i) {
            std::gamma_distribution<double> gamma(concentration[i], 1.0);
            g[i] = gamma(rng);
            if (g[i] <= 0.0) interior = false;
            total += g[i];
        }
        if (interior && total > 0.0) {
            g /= total;
            if ((g.array() > 0.0).all()) return g;
        }
    }
}

// Single categorical draw from a probability vector (assumed normalized).
inline int categorical_draw(Rng& rng, const Eigen::VectorXd& probs) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    double acc = 0.0;
    const auto r = probs.size();
    for (Eigen::Index i = 0; i + 1 < r; ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(r - 1);
}

// First n integers of a uniform random permutation of [0, total), via
// partial Fisher-Yates.
inline std::vector<int> sample_without_replacement(Rng& rng, int total, int n) {
    std::vector<int> idx(total);
    for (int i = 0; i < total; ++i) idx[i] = i;
    for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<int> pick(i, total - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(n);
    return idx;
}

}  // namespace hiercpt

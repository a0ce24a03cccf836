// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "hiercpt/common.hpp"
#include "hiercpt/hier_posterior.hpp"

namespace hiercpt {
namespace quad {

// Gauss-Kronrod 15(7) panel, standard QUADPACK abscissae.
inline const double kron_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline const double kron_w[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline const double gauss_w[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                                  0.417959183673469};

struct Panel {
    double value;
    double err;
};

template <typename F>
Panel gk15(const F& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 7; ++i) {
        double fv = f(c - h * kron_x[i]) + f(c + h * kron_x[i]);
        k += kron_w[i] * fv;
        if (i % 2 == 1) g += gauss_w[i / 2] * fv;
    }
    double fc = f(c);
    k += kron_w[7] * fc;
    g += gauss_w[3] * fc;
    return {h * k, std::abs(h * (k - g))};
}

template <typename F>
double adaptive(const F& f, double a, double b, double tol, long& evals, int depth = 0) {
    evals += 15;
    if (evals > 60'000'000) throw numeric_error("quadrature: evaluation budget exceeded");
    Panel p = gk15(f, a, b);
    if (p.err <= tol || p.err <= 1e-16 * std::abs(p.value)) return p.value;
    if (depth >= 48) throw numeric_error("quadrature: non-convergence");
    double mid = 0.5 * (a + b);
    return adaptive(f, a, mid, 0.5 * tol, evals, depth + 1) +
           adaptive(f, mid, b, 0.5 * tol, evals, depth + 1);
}

}  // namespace quad

namespace detail {

// Unnormalized moment integral of the alpha posterior over the simplex,
// with the integrand rescaled by exp(-shift) to keep it in range.
// r = 2 integrates over a in (0,1); r = 3 nests over the triangle.
inline double simplex_moment_integral(const CountTable& ct, const HierConfig& cfg,
                                      const std::vector<int>& k, double shift, double tol) {
    const int r = ct.r;
    detail::KernelCells cells(ct);
    auto log_integrand = [&](const Eigen::VectorXd& alpha) {
        double v = detail::log_data_term(alpha, cfg.s, cells) - shift;
        for (int x = 0; x < r; ++x)
            v += (cfg.alpha0[x] - 1.0 + k[x]) * std::log(alpha[x]);
        return v;
    };
    long evals = 0;
    if (r == 2) {
        auto f = [&](double a) {
            Eigen::VectorXd alpha(2);
            alpha << a, 1.0 - a;
            return std::exp(log_integrand(alpha));
        };
        return quad::adaptive(f, 0.0, 1.0, tol, evals);
    }
    // r == 3
    auto outer = [&](double a) {
        auto inner = [&](double b) {
            Eigen::VectorXd alpha(3);
            alpha << a, b, 1.0 - a - b;
            return std::exp(log_integrand(alpha));
        };
        long inner_evals = 0;
        double hi = 1.0 - a;
        if (hi <= 0.0) return 0.0;
        return quad::adaptive(inner, 0.0, hi, tol * 0.01, inner_evals);
    };
    return quad::adaptive(outer, 0.0, 1.0, tol, evals);
}

// Peak of the log kernel on a coarse grid; used to rescale the integrand.
inline double kernel_log_shift(const CountTable& ct, const HierConfig& cfg) {
    detail::KernelCells cells(ct);
    const int r = ct.r;
    double best = -std::numeric_limits<double>::infinity();
    auto probe = [&](const Eigen::VectorXd& alpha) {
        double v = detail::log_data_term(alpha, cfg.s, cells);
        for (int x = 0; x < r; ++x) v += (cfg.alpha0[x] - 1.0) * std::log(alpha[x]);
        if (v > best) best = v;
    };
    const int g = 128;
    if (r == 2) {
        for (int i = 1; i < g; ++i) {
            Eigen::VectorXd alpha(2);
            alpha << double(i) / g, 1.0 - double(i) / g;
            probe(alpha);
        }
    } else {
        for (int i = 1; i < g; ++i)
            for (int j = 1; i + j < g; ++j) {
                Eigen::VectorXd alpha(3);
                alpha << double(i) / g, double(j) / g, 1.0 - double(i + j) / g;
                probe(alpha);
            }
    }
    return best;
}

}  // namespace detail

// Deterministic quadrature oracle for posterior moments of alpha,
// E[prod_x alpha_x^{k_x}], limited to r <= 3.
inline double alpha_moment_quadrature(const CountTable& ct, const HierConfig& cfg,
                                      const std::vector<int>& k, double tol = 1e-11) {
    cfg.validate(ct.r);
    if (ct.r > 3) throw config_error("alpha_moment_quadrature: oracle supports r <= 3");
    if (static_cast<int>(k.size()) != ct.r)
        throw config_error("alpha_moment_quadrature: k length != r");
    for (int kx : k)
        if (kx < 0) throw config_error("alpha_moment_quadrature: k entries must be >= 0");

    const double shift = detail::kernel_log_shift(ct, cfg);
    const double denom = detail::simplex_moment_integral(ct, cfg, std::vector<int>(ct.r, 0),
                                                         shift, tol);
    const double numer = detail::simplex_moment_integral(ct, cfg, k, shift, tol);
    if (!(denom > 0.0)) throw numeric_error("alpha_moment_quadrature: vanishing normalizer");
    return numer / denom;
}

// Full posterior summary of alpha computed by quadrature; drop-in for the
// sampler on r <= 3 fixtures.
inline AlphaPosterior alpha_posterior_quadrature(const CountTable& ct, const HierConfig& cfg,
                                                 double tol = 1e-11) {
    cfg.validate(ct.r);
    if (ct.r > 3) throw config_error("alpha_posterior_quadrature: oracle supports r <= 3");
    const int r = ct.r;
    const double shift = detail::kernel_log_shift(ct, cfg);
    const double denom =
        detail::simplex_moment_integral(ct, cfg, std::vector<int>(r, 0), shift, tol);
    if (!(denom > 0.0)) throw numeric_error("alpha_posterior_quadrature: vanishing normalizer");

    auto moment = [&](const std::vector<int>& k) {
        return detail::simplex_moment_integral(ct, cfg, k, shift, tol) / denom;
    };

    AlphaPosterior post;
    post.mean.resize(r);
    for (int x = 0; x < r; ++x) {
        std::vector<int> k(r, 0);
        k[x] = 1;
        post.mean[x] = moment(k);
    }
    post.cov.resize(r, r);
    for (int x = 0; x < r; ++x) {
        for (int xp = x; xp < r; ++xp) {
            std::vector<int> k(r, 0);
            k[x] += 1;
            k[xp] += 1;
            double second = moment(k);
            post.cov(x, xp) = second - post.mean[x] * post.mean[xp];
            post.cov(xp, x) = post.cov(x, xp);
        }
    }
    // log of the prior-proposal normalizer, to match the sampler's estimate
    double log_beta = -std::lgamma(cfg.alpha0.sum());
    for (int x = 0; x < r; ++x) log_beta += std::lgamma(cfg.alpha0[x]);
    post.log_norm = shift + std::log(denom) - log_beta;
    post.ess = std::numeric_limits<double>::infinity();
    post.mc_se = Eigen::VectorXd::Zero(r);
    post.n_samples_used = 0;
    post.seed = cfg.seed;
    return post;
}

}  // namespace hiercpt

// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hiercpt/common.hpp"
#include "hiercpt/count_table.hpp"
#include "hiercpt/rng.hpp"

namespace hiercpt {

// Configuration of the hierarchical column-coupled Dirichlet model: the
// columns of a CPT share a latent Dirichlet mean vector alpha, itself
// given a Dirichlet(alpha0) prior.
struct HierConfig {
    double s = 1.0;            // equivalent sample size of each column prior
    Eigen::VectorXd alpha0;    // length-r positive hyper-parameters
    int n_samples = 100000;    // importance-sample count
    std::uint64_t seed = 0;
    double ess_floor = 0.01;   // minimum acceptable ESS fraction of n_samples

    void validate(int r) const {
        if (s <= 0.0) throw config_error("hier: s must be positive");
        if (alpha0.size() != r) throw config_error("hier: alpha0 length != child cardinality");
        if ((alpha0.array() <= 0.0).any())
            throw config_error("hier: alpha0 entries must be positive");
        if (n_samples < 1000) throw config_error("hier: n_samples must be >= 1000");
        if (ess_floor < 0.0 || ess_floor >= 1.0)
            throw config_error("hier: ess_floor must lie in [0,1)");
    }
};

// s = r, alpha0 = vector of ones: the defaults used in the experiments.
inline HierConfig default_hier_config(int r, std::uint64_t seed = 0, int n_samples = 100000) {
    HierConfig cfg;
    cfg.s = static_cast<double>(r);
    cfg.alpha0 = Eigen::VectorXd::Ones(r);
    cfg.n_samples = n_samples;
    cfg.seed = seed;
    return cfg;
}

namespace detail {

// log of the rising factorial (sa)(sa+1)...(sa+n-1). For short products
// the explicit product costs one log instead of two lgammas and rounds
// less; both routes are mathematically identical.
inline double log_rising(double sa, int n) {
    if (n == 0) return 0.0;
    if (n > 16) return std::lgamma(sa + n) - std::lgamma(sa);
    double prod = sa;
    for (int v = 2; v <= n; ++v) prod *= sa + v - 1;
    return std::log(prod);
}

// Nonzero cells of the count table, the only part of the data the
// marginal posterior of alpha depends on.
struct KernelCells {
    std::vector<std::pair<int, int>> cells;  // (child state, count)
    explicit KernelCells(const CountTable& ct) {
        for (int x = 0; x < ct.r; ++x)
            for (int y = 0; y < ct.q; ++y)
                if (ct.counts(x, y) > 0) cells.emplace_back(x, ct.counts(x, y));
    }
};

inline double log_data_term(const Eigen::VectorXd& alpha, double s, const KernelCells& cells) {
    double acc = 0.0;
    for (const auto& [x, n] : cells.cells) acc += log_rising(s * alpha[x], n);
    return acc;
}

}  // namespace detail

// log of the unnormalized marginal posterior of alpha (prior times the
// rising-factorial data term), up to an additive constant.
inline double log_posterior_kernel(const Eigen::VectorXd& alpha, const CountTable& ct,
                                   const HierConfig& cfg) {
    cfg.validate(ct.r);
    if ((alpha.array() <= 0.0).any())
        throw numeric_error("log_posterior_kernel: alpha on the simplex boundary");
    detail::KernelCells cells(ct);
    double value = detail::log_data_term(alpha, cfg.s, cells);
    for (int x = 0; x < ct.r; ++x) value += (cfg.alpha0[x] - 1.0) * std::log(alpha[x]);
    return value;
}

// Posterior summary of the shared Dirichlet parameter alpha.
struct AlphaPosterior {
    Eigen::VectorXd mean;   // sums to 1, entries in (0,1)
    Eigen::MatrixXd cov;    // rows sum to 0; positive semidefinite
    double ess = 0.0;       // (sum w)^2 / sum w^2
    double log_norm = 0.0;  // log normalizing-constant estimate, up to the proposal constant
    Eigen::VectorXd mc_se;  // per-coordinate standard error of mean
    int n_samples_used = 0;
    std::uint64_t seed = 0;
};

// Self-normalized importance sampling with the Dirichlet(alpha0) prior as
// proposal. The weight is then exactly the rising-factorial data term, so
// the weighted moments estimate the posterior integrals without any
// approximation family; only Monte-Carlo error enters. If the effective
// sample size falls below ess_floor * n_samples the run is retried once
// with 10x samples against the same absolute ESS target, then fails.
inline AlphaPosterior alpha_posterior(const CountTable& ct, const HierConfig& cfg) {
    cfg.validate(ct.r);
    const int r = ct.r;
    detail::KernelCells cells(ct);
    const double target_ess = cfg.ess_floor * cfg.n_samples;

    for (int attempt = 0; attempt < 2; ++attempt) {
        const int n = cfg.n_samples * (attempt == 0 ? 1 : 10);
        auto rng = make_rng(cfg.seed);
        Eigen::MatrixXd samples(n, r);
        Eigen::VectorXd logw(n);
        double max_logw = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd a = dirichlet_draw(rng, cfg.alpha0);
            samples.row(i) = a.transpose();
            double lw = detail::log_data_term(a, cfg.s, cells);
            if (!std::isfinite(lw)) throw numeric_error("alpha_posterior: non-finite weight");
            logw[i] = lw;
            if (lw > max_logw) max_logw = lw;
        }

        double sum_w = 0.0, sum_w2 = 0.0;
        Eigen::VectorXd first = Eigen::VectorXd::Zero(r);
        Eigen::MatrixXd second = Eigen::MatrixXd::Zero(r, r);
        for (int i = 0; i < n; ++i) {
            double w = std::exp(logw[i] - max_logw);
            sum_w += w;
            sum_w2 += w * w;
            first.noalias() += w * samples.row(i).transpose();
            second.noalias() += w * samples.row(i).transpose() * samples.row(i);
        }
        double ess = sum_w * sum_w / sum_w2;
        if (ess < target_ess) {
            if (attempt == 0) continue;
            throw numeric_error("alpha_posterior: effective sample size " + format_double(ess) +
                                " below floor " + format_double(target_ess) +
                                " even after 10x retry");
        }

        AlphaPosterior post;
        post.mean = first / sum_w;
        post.cov = second / sum_w - post.mean * post.mean.transpose();
        post.cov = ((post.cov + post.cov.transpose()) / 2.0).eval();
        post.ess = ess;
        post.log_norm = max_logw + std::log(sum_w / n);
        post.mc_se = Eigen::VectorXd::Zero(r);
        for (int i = 0; i < n; ++i) {
            double wn = std::exp(logw[i] - max_logw) / sum_w;
            Eigen::VectorXd d = samples.row(i).transpose() - post.mean;
            post.mc_se.array() += wn * wn * d.array().square();
        }
        post.mc_se = post.mc_se.array().sqrt();
        post.n_samples_used = n;
        post.seed = cfg.seed;
        return post;
    }
    throw numeric_error("alpha_posterior: unreachable");
}

// Hierarchical CPT estimate: posterior mean of every column plus,
// optionally, the full cross-column covariance. Flat index = y*r + x.
struct HierCptEstimate {
    Eigen::MatrixXd theta;  // r x q, column-stochastic
    AlphaPosterior alpha_post;
    double s = 0.0;
    std::optional<Eigen::MatrixXd> theta_cov;  // (r*q) x (r*q)
};

inline int theta_flat_index(int x, int y, int r) { return y * r + x; }

// Builds the estimate from an already-computed posterior of alpha, so the
// same formulas can be driven by the sampler or by the quadrature oracle.
inline HierCptEstimate hierarchical_estimate_from(const AlphaPosterior& post,
                                                  const CountTable& ct, const HierConfig& cfg,
                                                  bool want_cov = false) {
    const int r = ct.r, q = ct.q;
    const double s = cfg.s;
    HierCptEstimate est;
    est.alpha_post = post;
    est.s = s;
    est.theta.resize(r, q);
    for (int y = 0; y < q; ++y)
        est.theta.col(y) = (ct.counts.col(y).cast<double>() + s * post.mean) /
                           (ct.col_totals(y) + s);

    if (want_cov) {
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(r * q, r * q);
        for (int y = 0; y < q; ++y) {
            const double ny = ct.col_totals(y);
            for (int yp = 0; yp < q; ++yp) {
                const double nyp = ct.col_totals(yp);
                const double c_yyp = (y == yp) ? (ny + s) * (ny + s + 1.0)
                                               : (ny + s) * (nyp + s);
                for (int x = 0; x < r; ++x) {
                    for (int xp = 0; xp < r; ++xp) {
                        double v = s * s * post.cov(x, xp) / c_yyp;
                        if (y == yp) {
                            double within = est.theta(x, y) * ((x == xp ? 1.0 : 0.0) -
                                                               est.theta(xp, y));
                            v += within / (ny + s + 1.0);
                        }
                        cov(theta_flat_index(x, y, r), theta_flat_index(xp, yp, r)) = v;
                    }
                }
            }
        }
        est.theta_cov = std::move(cov);
    }
    return est;
}

inline HierCptEstimate hierarchical_estimate(const CountTable& ct, const HierConfig& cfg,
                                             bool want_cov = false) {
    return hierarchical_estimate_from(alpha_posterior(ct, cfg), ct, cfg, want_cov);
}

// Monte-Carlo oracle for the covariance of the joint posterior of all CPT
// columns: sampling-importance-resampling of alpha from its posterior
// kernel, then one Dirichlet(s*alpha + n_y) draw per column and per
// resampled alpha. Standard errors come from batch means.
struct ThetaCovOracle {
    Eigen::MatrixXd cov;  // (r*q) x (r*q) empirical covariance
    Eigen::MatrixXd se;   // entrywise Monte-Carlo standard error
    int n_draws = 0;
};

inline ThetaCovOracle theta_cov_mc_oracle(const CountTable& ct, const HierConfig& cfg,
                                          int n_draws) {
    cfg.validate(ct.r);
    if (n_draws < 10000) throw config_error("theta_cov_mc_oracle: n_draws must be >= 10^4");
    const int r = ct.r, q = ct.q, d = r * q;
    detail::KernelCells cells(ct);
    auto rng = make_rng(cfg.seed);

    // importance stage
    const int m = n_draws;
    Eigen::MatrixXd proposals(m, r);
    std::vector<double> logw(m);
    double max_logw = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd a = dirichlet_draw(rng, cfg.alpha0);
        proposals.row(i) = a.transpose();
        logw[i] = detail::log_data_term(a, cfg.s, cells);
        if (!std::isfinite(logw[i])) throw numeric_error("theta_cov_mc_oracle: non-finite weight");
        if (logw[i] > max_logw) max_logw = logw[i];
    }
    std::vector<double> w(m);
    double sum_w = 0.0, sum_w2 = 0.0;
    for (int i = 0; i < m; ++i) {
        w[i] = std::exp(logw[i] - max_logw);
        sum_w += w[i];
        sum_w2 += w[i] * w[i];
    }
    if (sum_w * sum_w / sum_w2 < cfg.ess_floor * m)
        throw numeric_error("theta_cov_mc_oracle: degenerate resampling (ESS too low)");
    std::discrete_distribution<int> resample(w.begin(), w.end());

    // resampling + column draws, accumulated per batch
    const int n_batches = 50;
    Eigen::MatrixXd draws(n_draws, d);
    for (int i = 0; i < n_draws; ++i) {
        Eigen::VectorXd a = proposals.row(resample(rng)).transpose();
        for (int y = 0; y < q; ++y) {
            Eigen::VectorXd conc = cfg.s * a + ct.counts.col(y).cast<double>();
            Eigen::VectorXd th = dirichlet_draw(rng, conc);
            for (int x = 0; x < r; ++x) draws(i, theta_flat_index(x, y, r)) = th[x];
        }
    }

    auto covariance_of = [d](const Eigen::Ref<const Eigen::MatrixXd>& block) {
        Eigen::RowVectorXd mu = block.colwise().mean();
        Eigen::MatrixXd centered = block.rowwise() - mu;
        return Eigen::MatrixXd((centered.transpose() * centered) / (block.rows() - 1));
    };

    ThetaCovOracle oracle;
    oracle.cov = covariance_of(draws);
    oracle.n_draws = n_draws;

    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd acc2 = Eigen::MatrixXd::Zero(d, d);
    const int base = n_draws / n_batches;
    for (int b = 0; b < n_batches; ++b) {
        int lo = b * base;
        int hi = (b == n_batches - 1) ? n_draws : lo + base;
        Eigen::MatrixXd cb = covariance_of(draws.middleRows(lo, hi - lo));
        acc += cb;
        acc2 += cb.cwiseProduct(cb);
    }
    Eigen::MatrixXd batch_mean = acc / n_batches;
    Eigen::MatrixXd batch_var =
        (acc2 / n_batches - batch_mean.cwiseProduct(batch_mean)).cwiseMax(0.0);
    oracle.se = (batch_var / n_batches).cwiseSqrt();
    return oracle;
}

}  // namespace hiercpt

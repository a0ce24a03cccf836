// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hiercpt/common.hpp"
#include "hiercpt/count_table.hpp"

namespace hiercpt {

enum class Method { ML, BAYES, IDEAL, HIER };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::ML: return "ML";
        case Method::BAYES: return "BAYES";
        case Method::IDEAL: return "IDEAL";
        case Method::HIER: return "HIER";
    }
    return "?";
}

// A fitted column-stochastic table with provenance. Columns with no data
// that ML cannot define are filled uniform and flagged.
struct CptEstimate {
    Eigen::MatrixXd theta;  // r x q, columns sum to 1
    Method method = Method::ML;
    double s = 0.0;                    // equivalent sample size (BAYES/IDEAL/HIER)
    Eigen::VectorXd alpha;             // prior mean vector when applicable
    std::vector<bool> undefined_cols;  // ML columns with n_y = 0

    bool has_undefined() const {
        for (bool f : undefined_cols)
            if (f) return true;
        return false;
    }
};

inline void check_prior(double s, const Eigen::VectorXd& alpha, int r) {
    if (s <= 0.0) throw config_error("estimator: s must be positive");
    if (alpha.size() != r) throw config_error("estimator: alpha length != child cardinality");
    if ((alpha.array() <= 0.0).any()) throw config_error("estimator: alpha entries must be positive");
    if (std::abs(alpha.sum() - 1.0) > 1e-9)
        throw config_error("estimator: alpha must sum to 1, got " + format_double(alpha.sum()));
}

inline CptEstimate ml_estimate(const CountTable& ct) {
    CptEstimate est;
    est.method = Method::ML;
    est.theta.resize(ct.r, ct.q);
    est.undefined_cols.assign(ct.q, false);
    for (int y = 0; y < ct.q; ++y) {
        if (ct.col_totals(y) > 0) {
            est.theta.col(y) = ct.counts.col(y).cast<double>() / ct.col_totals(y);
        } else {
            est.theta.col(y).setConstant(1.0 / ct.r);
            est.undefined_cols[y] = true;
        }
    }
    return est;
}

// Posterior mean under a fixed Dirichlet(s*alpha) column prior:
// (n_xy + s*alpha_x) / (n_y + s).
inline CptEstimate bayes_estimate(const CountTable& ct, double s, const Eigen::VectorXd& alpha) {
    check_prior(s, alpha, ct.r);
    CptEstimate est;
    est.method = Method::BAYES;
    est.s = s;
    est.alpha = alpha;
    est.theta.resize(ct.r, ct.q);
    est.undefined_cols.assign(ct.q, false);
    for (int y = 0; y < ct.q; ++y)
        est.theta.col(y) =
            (ct.counts.col(y).cast<double>() + s * alpha) / (ct.col_totals(y) + s);
    return est;
}

// Same formula evaluated at the generative prior mean; only meaningful in
// simulations where that vector is known.
inline CptEstimate ideal_estimate(const CountTable& ct, double s,
                                  const Eigen::VectorXd& alpha_true) {
    CptEstimate est = bayes_estimate(ct, s, alpha_true);
    est.method = Method::IDEAL;
    return est;
}

inline Eigen::VectorXd uniform_alpha(int r) {
    return Eigen::VectorXd::Constant(r, 1.0 / r);
}

// BDeu with uniform alpha and a free equivalent sample size (the
// experiments use s = 1 and s = 10).
inline CptEstimate bdeu_estimate(const CountTable& ct, double s) {
    return bayes_estimate(ct, s, uniform_alpha(ct.r));
}

// Classic convention: alpha_x = 1/r with s = 1/q.
inline CptEstimate bdeu_classic_estimate(const CountTable& ct) {
    return bayes_estimate(ct, 1.0 / ct.q, uniform_alpha(ct.r));
}

inline void write_cpt_csv(std::ostream& out, const CptEstimate& est) {
    out << "# method=" << method_name(est.method);
    if (est.method != Method::ML) {
        out << " s=" << format_double(est.s) << " alpha=";
        for (int i = 0; i < est.alpha.size(); ++i) {
            if (i) out << ';';
            out << format_double(est.alpha(i));
        }
    }
    out << '\n';
    out << "x";
    for (int y = 0; y < est.theta.cols(); ++y) out << ",y" << y;
    out << '\n';
    for (int x = 0; x < est.theta.rows(); ++x) {
        out << x;
        for (int y = 0; y < est.theta.cols(); ++y) out << ',' << format_double(est.theta(x, y));
        out << '\n';
    }
}

}  // namespace hiercpt

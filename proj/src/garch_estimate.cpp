#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "hedgescale/errors.hpp"
#include "hedgescale/garch.hpp"
#include "hedgescale/optim.hpp"
#include "hedgescale/rng.hpp"
#include "hedgescale/stats.hpp"

namespace hedgescale::garch {

namespace {

double sigmoid(double x) {
    x = std::clamp(x, -30.0, 30.0);
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logit(double p) {
    p = std::clamp(p, 1e-12, 1.0 - 1e-12);
    return std::log(p / (1.0 - p));
}

/// (alpha, beta) <-> (persistence, share) logistic coordinates. Keeps
/// alpha >= 0, beta >= 0, alpha + beta < 1 for any real input.
struct AlphaBeta {
    double alpha;
    double beta;
    double d_alpha_dv1, d_alpha_dv2;
    double d_beta_dv1, d_beta_dv2;
};

AlphaBeta alpha_beta_from(double v1, double v2) {
    const double p = sigmoid(v1);
    const double u = sigmoid(v2);
    const double dp = p * (1.0 - p);
    const double du = u * (1.0 - u);
    AlphaBeta ab;
    ab.alpha = p * u;
    ab.beta = p * (1.0 - u);
    ab.d_alpha_dv1 = u * dp;
    ab.d_alpha_dv2 = p * du;
    ab.d_beta_dv1 = (1.0 - u) * dp;
    ab.d_beta_dv2 = -p * du;
    return ab;
}

void alpha_beta_to(double alpha, double beta, double& v1, double& v2) {
    const double p = std::clamp(alpha + beta, 1e-10, 1.0 - 1e-10);
    v1 = logit(p);
    v2 = logit(alpha > 0.0 ? alpha / p : 1e-10);
}

/// Transformed coordinates for the vech model:
///   [ln w_s, v_p_s, v_u_s, ln w_f, v_p_f, v_u_f, w_sf/scale, v_p_sf, v_u_sf]
/// The covariance intercept stays linear (it may be negative) but is divided
/// by a data-derived scale so all coordinates are O(1) for the optimizer.
struct VechTransform {
    double omega_sf_scale = 1.0;

    [[nodiscard]] Eigen::VectorXd to_unconstrained(const VechGarchParams& p) const {
        Eigen::VectorXd v(kVechParamCount);
        v[0] = std::log(p.s.omega);
        alpha_beta_to(p.s.alpha, p.s.beta, v[1], v[2]);
        v[3] = std::log(p.f.omega);
        alpha_beta_to(p.f.alpha, p.f.beta, v[4], v[5]);
        v[6] = p.sf.omega / omega_sf_scale;
        alpha_beta_to(p.sf.alpha, p.sf.beta, v[7], v[8]);
        return v;
    }

    [[nodiscard]] VechGarchParams to_params(const Eigen::VectorXd& v, double mu_s,
                                            double mu_f) const {
        VechGarchParams p;
        p.s.omega = std::exp(std::clamp(v[0], -60.0, 60.0));
        const auto ab_s = alpha_beta_from(v[1], v[2]);
        p.s.alpha = ab_s.alpha;
        p.s.beta = ab_s.beta;
        p.f.omega = std::exp(std::clamp(v[3], -60.0, 60.0));
        const auto ab_f = alpha_beta_from(v[4], v[5]);
        p.f.alpha = ab_f.alpha;
        p.f.beta = ab_f.beta;
        p.sf.omega = v[6] * omega_sf_scale;
        const auto ab_sf = alpha_beta_from(v[7], v[8]);
        p.sf.alpha = ab_sf.alpha;
        p.sf.beta = ab_sf.beta;
        p.mu_s = mu_s;
        p.mu_f = mu_f;
        return p;
    }

    /// dtheta/dv, block diagonal (3 blocks of 3).
    [[nodiscard]] Eigen::MatrixXd jacobian(const Eigen::VectorXd& v) const {
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(kVechParamCount, kVechParamCount);
        for (int block = 0; block < 3; ++block) {
            const int o = 3 * block;
            if (block < 2) {
                j(o, o) = std::exp(std::clamp(v[o], -60.0, 60.0));
            } else {
                j(o, o) = omega_sf_scale;
            }
            const auto ab = alpha_beta_from(v[o + 1], v[o + 2]);
            j(o + 1, o + 1) = ab.d_alpha_dv1;
            j(o + 1, o + 2) = ab.d_alpha_dv2;
            j(o + 2, o + 1) = ab.d_beta_dv1;
            j(o + 2, o + 2) = ab.d_beta_dv2;
        }
        return j;
    }
};

/// One attempt: BFGS, then a simplex restart if the line search stalls, then
/// a Newton polish to push the gradient below the convergence tolerance.
optim::Result robust_minimize(const optim::Objective& f, const optim::Gradient& g,
                              const Eigen::VectorXd& v0, const EstimateOptions& opts) {
    optim::Options bopts;
    bopts.grad_tol = opts.grad_tol;
    bopts.max_iterations = opts.max_iterations;
    optim::Result res = optim::bfgs_minimize(f, g, v0, bopts);
    if (!res.converged) {
        optim::NelderMeadOptions nm_opts;
        nm_opts.max_evaluations = 4000;
        const optim::Result nm = optim::nelder_mead(f, res.x, nm_opts);
        optim::Result retry = optim::bfgs_minimize(f, g, nm.x, bopts);
        retry.iterations += res.iterations;
        if (retry.f <= res.f || !std::isfinite(res.f)) res = retry;
    }
    if (!res.converged) {
        optim::Result polished = optim::newton_polish(f, g, res.x, bopts);
        polished.iterations += res.iterations;
        // Newton steps chase the gradient, not the objective; accept unless
        // the objective got materially worse.
        const double f_slack = 1e-8 * (1.0 + std::abs(res.f));
        if (polished.grad_norm < res.grad_norm && polished.f <= res.f + f_slack) res = polished;
    }
    return res;
}

struct SeResult {
    Eigen::VectorXd plain;
    Eigen::VectorXd robust;
};

/// Delta-method standard errors: invert the transformed-space Hessian
/// (finite differences of the analytic gradient), sandwich it with the
/// outer product of transformed scores, and map both covariances back to the
/// natural parameters through the transform Jacobian.
SeResult standard_errors(const optim::Gradient& neg_grad, const Eigen::VectorXd& v_hat,
                         const Eigen::MatrixXd& scores_theta, const Eigen::MatrixXd& jac) {
    const Eigen::Index n = v_hat.size();
    Eigen::MatrixXd hess(n, n);
    Eigen::VectorXd vp = v_hat;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = 1e-4 * std::max(1.0, std::abs(v_hat[j]));
        vp[j] = v_hat[j] + h;
        const Eigen::VectorXd g_plus = neg_grad(vp);
        vp[j] = v_hat[j] - h;
        const Eigen::VectorXd g_minus = neg_grad(vp);
        vp[j] = v_hat[j];
        hess.col(j) = (g_plus - g_minus) / (2.0 * h);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();

    const double nan = std::numeric_limits<double>::quiet_NaN();
    SeResult se{Eigen::VectorXd::Constant(n, nan), Eigen::VectorXd::Constant(n, nan)};

    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        return se;  // not at an interior optimum; leave SEs undefined
    }
    const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd cov_v_plain = ldlt.solve(ident);

    const Eigen::MatrixXd scores_v = scores_theta * jac;  // rows s_theta' J
    const Eigen::MatrixXd opg = scores_v.transpose() * scores_v;
    const Eigen::MatrixXd cov_v_robust = cov_v_plain * opg * cov_v_plain;

    const Eigen::MatrixXd cov_t_plain = jac * cov_v_plain * jac.transpose();
    const Eigen::MatrixXd cov_t_robust = jac * cov_v_robust * jac.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
        se.plain[i] = cov_t_plain(i, i) > 0.0 ? std::sqrt(cov_t_plain(i, i)) : nan;
        se.robust[i] = cov_t_robust(i, i) > 0.0 ? std::sqrt(cov_t_robust(i, i)) : nan;
    }
    return se;
}

}  // namespace

VechEstimationResult estimate_vech(const AlignedPair& pair, std::optional<VechGarchParams> init,
                                   const EstimateOptions& opts) {
    pair.validate();
    const Eigen::Index t_len = pair.size();
    if (t_len < opts.min_observations) {
        throw Error(Errc::degenerate_data,
                    "need >= " + std::to_string(opts.min_observations) + " observations, got " +
                        std::to_string(t_len));
    }
    if (pair.cash.returns.maxCoeff() == pair.cash.returns.minCoeff() ||
        pair.futures.returns.maxCoeff() == pair.futures.returns.minCoeff()) {
        throw Error(Errc::degenerate_data, "constant returns on one leg");
    }
    const double var_s = stats::variance(pair.cash.returns, false);
    const double var_f = stats::variance(pair.futures.returns, false);
    if (!(var_s > 0.0) || !(var_f > 0.0)) {
        throw Error(Errc::degenerate_data, "constant returns on one leg");
    }

    const double mu_s = pair.cash.returns.mean();
    const double mu_f = pair.futures.returns.mean();
    const double cov_sf =
        ((pair.cash.returns.array() - mu_s) * (pair.futures.returns.array() - mu_f)).mean();

    VechTransform tf;
    tf.omega_sf_scale = std::max(std::abs(cov_sf), 1e-12) * 0.1;

    VechGarchParams start;
    if (init) {
        init->validate();
        start = *init;
        // Two-step estimation fixes the means at the sample means.
        if (!opts.estimate_means_jointly) {
            start.mu_s = mu_s;
            start.mu_f = mu_f;
        }
    } else {
        start.s = {var_s * 0.05, 0.05, 0.90};
        start.f = {var_f * 0.05, 0.05, 0.90};
        start.sf = {cov_sf * 0.05, 0.05, 0.90};
        start.mu_s = mu_s;
        start.mu_f = mu_f;
    }

    // Joint-mean MLE appends two scaled mean coordinates; the default
    // two-step path optimizes the nine variance parameters at fixed means.
    const bool joint = opts.estimate_means_jointly;
    const double sd_s = std::sqrt(var_s);
    const double sd_f = std::sqrt(var_f);
    auto means_at = [&](const Eigen::VectorXd& v) {
        return joint ? std::pair{start.mu_s + sd_s * v[9], start.mu_f + sd_f * v[10]}
                     : std::pair{start.mu_s, start.mu_f};
    };

    const optim::Objective objective = [&](const Eigen::VectorXd& v) {
        const auto [m_s, m_f] = means_at(v);
        return -loglik_vech(pair, tf.to_params(v.head(kVechParamCount).eval(), m_s, m_f));
    };
    const optim::Gradient gradient = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        const auto [m_s, m_f] = means_at(v);
        const Eigen::VectorXd vv = v.head(kVechParamCount).eval();
        const VechGarchParams p = tf.to_params(vv, m_s, m_f);
        Eigen::VectorXd g(v.size());
        g.head(kVechParamCount) =
            -(tf.jacobian(vv).transpose() * loglik_vech_gradient(pair, p));
        for (Eigen::Index i = kVechParamCount; i < v.size(); ++i) {
            Eigen::VectorXd vp = v;
            const double h = 1e-6;
            vp[i] = v[i] + h;
            const double f_plus = objective(vp);
            vp[i] = v[i] - h;
            const double f_minus = objective(vp);
            g[i] = (f_plus - f_minus) / (2.0 * h);
        }
        return g;
    };

    Eigen::VectorXd v0(joint ? kVechParamCount + 2 : kVechParamCount);
    v0.head(kVechParamCount) = tf.to_unconstrained(start);
    if (joint) v0.tail(2).setZero();
    optim::Result best = robust_minimize(objective, gradient, v0, opts);
    int total_iterations = best.iterations;
    if (!best.converged) {
        Rng rng(opts.jitter_seed);
        for (int k = 0; k < opts.multistarts && !best.converged; ++k) {
            Eigen::VectorXd v_jit = v0;
            for (Eigen::Index i = 0; i < v_jit.size(); ++i) {
                v_jit[i] += rng.uniform(-0.75, 0.75);
            }
            optim::Result attempt = robust_minimize(objective, gradient, v_jit, opts);
            total_iterations += attempt.iterations;
            if (attempt.f < best.f) best = attempt;
        }
    }

    VechEstimationResult result;
    const auto [m_s_hat, m_f_hat] = means_at(best.x);
    const Eigen::VectorXd v_hat = best.x.head(kVechParamCount).eval();
    result.params = tf.to_params(v_hat, m_s_hat, m_f_hat);
    result.loglik = -best.f;
    result.converged = best.converged;
    result.iterations = total_iterations;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    result.plain_se = Eigen::VectorXd::Constant(kVechParamCount, nan);
    result.robust_se = Eigen::VectorXd::Constant(kVechParamCount, nan);
    if (opts.compute_standard_errors) {
        // SEs for the variance parameters at the estimated means (profile
        // information); covers both the two-step and the joint path.
        const optim::Gradient var_gradient = [&, m_s = m_s_hat,
                                              m_f = m_f_hat](const Eigen::VectorXd& v) {
            const VechGarchParams p = tf.to_params(v, m_s, m_f);
            return Eigen::VectorXd(-(tf.jacobian(v).transpose() * loglik_vech_gradient(pair, p)));
        };
        const Eigen::MatrixXd scores = loglik_vech_scores(pair, result.params);
        const auto se = standard_errors(var_gradient, v_hat, scores, tf.jacobian(v_hat));
        result.plain_se = se.plain;
        result.robust_se = se.robust;
    }
    return result;
}

UniEstimationResult estimate_univariate(const ReturnSeries& r, std::optional<UniGarchParams> init,
                                        const EstimateOptions& opts) {
    r.validate();
    const Eigen::Index t_len = r.size();
    if (t_len < opts.min_observations) {
        throw Error(Errc::degenerate_data,
                    "need >= " + std::to_string(opts.min_observations) + " observations, got " +
                        std::to_string(t_len));
    }
    if (r.returns.maxCoeff() == r.returns.minCoeff()) {
        throw Error(Errc::degenerate_data, "constant returns");
    }
    const double var = stats::variance(r.returns, false);
    if (!(var > 0.0)) {
        throw Error(Errc::degenerate_data, "constant returns");
    }
    const double mu = r.returns.mean();

    UniGarchParams start;
    if (init) {
        init->validate();
        start = *init;
        start.mu = mu;
    } else {
        start = {var * 0.05, 0.05, 0.90, mu};
    }

    auto to_params = [&](const Eigen::VectorXd& v) {
        UniGarchParams p;
        p.omega = std::exp(std::clamp(v[0], -60.0, 60.0));
        const auto ab = alpha_beta_from(v[1], v[2]);
        p.alpha = ab.alpha;
        p.beta = ab.beta;
        p.mu = mu;
        return p;
    };
    auto jacobian = [&](const Eigen::VectorXd& v) {
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(3, 3);
        j(0, 0) = std::exp(std::clamp(v[0], -60.0, 60.0));
        const auto ab = alpha_beta_from(v[1], v[2]);
        j(1, 1) = ab.d_alpha_dv1;
        j(1, 2) = ab.d_alpha_dv2;
        j(2, 1) = ab.d_beta_dv1;
        j(2, 2) = ab.d_beta_dv2;
        return j;
    };

    const optim::Objective objective = [&](const Eigen::VectorXd& v) {
        return -loglik_univariate(r, to_params(v));
    };
    const optim::Gradient gradient = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return -(jacobian(v).transpose() * loglik_univariate_gradient(r, to_params(v)));
    };

    Eigen::VectorXd v0(3);
    v0[0] = std::log(start.omega);
    alpha_beta_to(start.alpha, start.beta, v0[1], v0[2]);

    optim::Result best = robust_minimize(objective, gradient, v0, opts);
    int total_iterations = best.iterations;
    if (!best.converged) {
        Rng rng(opts.jitter_seed);
        for (int k = 0; k < opts.multistarts && !best.converged; ++k) {
            Eigen::VectorXd v_jit = v0;
            for (Eigen::Index i = 0; i < v_jit.size(); ++i) {
                v_jit[i] += rng.uniform(-0.75, 0.75);
            }
            optim::Result attempt = robust_minimize(objective, gradient, v_jit, opts);
            total_iterations += attempt.iterations;
            if (attempt.f < best.f) best = attempt;
        }
    }

    UniEstimationResult result;
    result.params = to_params(best.x);
    result.loglik = -best.f;
    result.converged = best.converged;
    result.iterations = total_iterations;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    result.plain_se.setConstant(nan);
    result.robust_se.setConstant(nan);
    if (opts.compute_standard_errors) {
        const Eigen::MatrixXd scores = loglik_univariate_scores(r, result.params);
        const auto se = standard_errors(gradient, best.x, scores, jacobian(best.x));
        result.plain_se = se.plain;
        result.robust_se = se.robust;
    }
    return result;
}

}  // namespace hedgescale::garch

#include <cmath>

#include "hedgescale/errors.hpp"
#include "hedgescale/garch.hpp"

namespace hedgescale::garch {

namespace {

constexpr double kClampFactor = 1.0 - 1e-8;
constexpr double kPenaltyWeight = 1e6;
constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)

using Vec9 = Eigen::Matrix<double, 9, 1>;

void check_equation(const GarchEquation& eq, const char* name, bool require_nonneg) {
    if (!std::isfinite(eq.omega) || !std::isfinite(eq.alpha) || !std::isfinite(eq.beta)) {
        throw Error(Errc::invalid_params, std::string(name) + " has non-finite parameters");
    }
    if (require_nonneg && (eq.alpha < 0.0 || eq.beta < 0.0)) {
        throw Error(Errc::invalid_params, std::string(name) + " needs alpha, beta >= 0");
    }
    if (!(eq.alpha + eq.beta < 1.0)) {
        throw Error(Errc::invalid_params,
                    std::string(name) + " persistence " + std::to_string(eq.alpha + eq.beta) +
                        " not < 1");
    }
}

struct FilterRequest {
    bool density = false;
    bool gradient = false;
    bool scores = false;
    bool pd_guard = true;
};

struct FilterResult {
    CovariancePath path;
    double loglik = 0.0;
    Vec9 grad = Vec9::Zero();
    Eigen::MatrixXd scores;
};

/// Single pass over the three recursions. Gradient state is carried per
/// equation; the covariance derivative spans all nine parameters because the
/// clamp ties it to the variance paths.
FilterResult run_vech_filter(const AlignedPair& pair, const VechGarchParams& p,
                             const std::optional<VechSeed>& seed, const FilterRequest& req) {
    pair.validate();
    p.validate();
    const Eigen::Index t_len = pair.size();
    if (t_len < 1) throw Error(Errc::too_short, "empty pair");

    FilterResult out;
    CovariancePath& path = out.path;
    path.dates = pair.cash.dates;
    path.eps_s = pair.cash.returns.array() - p.mu_s;
    path.eps_f = pair.futures.returns.array() - p.mu_f;
    path.h_s.resize(t_len);
    path.h_f.resize(t_len);
    path.h_sf.resize(t_len);

    double seed_s, seed_f, seed_sf;
    if (seed) {
        seed_s = seed->h_s;
        seed_f = seed->h_f;
        seed_sf = seed->h_sf;
    } else {
        const double t_d = static_cast<double>(t_len);
        seed_s = path.eps_s.squaredNorm() / t_d;
        seed_f = path.eps_f.squaredNorm() / t_d;
        seed_sf = path.eps_s.dot(path.eps_f) / t_d;
    }
    if (!(seed_s > 0.0) || !(seed_f > 0.0)) {
        throw Error(Errc::degenerate_data, "zero seed variance (constant leg?)");
    }

    const bool want_grad = req.gradient || req.scores;
    if (req.scores) out.scores = Eigen::MatrixXd::Zero(t_len, kVechParamCount);

    Eigen::Vector3d d_hs = Eigen::Vector3d::Zero();  // d h_s / d(omega_s, alpha_s, beta_s)
    Eigen::Vector3d d_hf = Eigen::Vector3d::Zero();
    Vec9 d_hsf = Vec9::Zero();

    double h_s = seed_s;
    double h_f = seed_f;
    double h_sf = seed_sf;
    {
        // Guard the seed as well; caller-supplied seeds may violate the bound.
        const double bound = std::sqrt(h_s * h_f);
        if (std::abs(h_sf) > bound) h_sf = std::copysign(kClampFactor * bound, h_sf);
    }

    for (Eigen::Index t = 0; t < t_len; ++t) {
        Vec9 d_pen = Vec9::Zero();
        if (t > 0) {
            const double u_s = path.eps_s[t - 1] * path.eps_s[t - 1];
            const double u_f = path.eps_f[t - 1] * path.eps_f[t - 1];
            const double u_sf = path.eps_s[t - 1] * path.eps_f[t - 1];

            const double h_s_prev = h_s;
            const double h_f_prev = h_f;
            const double h_sf_prev = h_sf;

            h_s = p.s.omega + p.s.alpha * u_s + p.s.beta * h_s_prev;
            h_f = p.f.omega + p.f.alpha * u_f + p.f.beta * h_f_prev;
            const double raw_sf = p.sf.omega + p.sf.alpha * u_sf + p.sf.beta * h_sf_prev;

            if (want_grad) {
                d_hs = Eigen::Vector3d(1.0, u_s, h_s_prev) + p.s.beta * d_hs;
                d_hf = Eigen::Vector3d(1.0, u_f, h_f_prev) + p.f.beta * d_hf;
                d_hsf = (p.sf.beta * d_hsf).eval();
                d_hsf[6] += 1.0;
                d_hsf[7] += u_sf;
                d_hsf[8] += h_sf_prev;
            }

            const double bound = std::sqrt(h_s * h_f);
            if (req.pd_guard && std::abs(raw_sf) > bound) {
                const double sign = raw_sf >= 0.0 ? 1.0 : -1.0;
                h_sf = sign * kClampFactor * bound;
                ++path.clamped_steps;
                const double rel = std::abs(raw_sf) / bound - 1.0;
                path.clamp_penalty += rel * rel;
                if (want_grad) {
                    Vec9 d_bound = Vec9::Zero();
                    d_bound.segment<3>(0) = d_hs * (h_f / (2.0 * bound));
                    d_bound.segment<3>(3) = d_hf * (h_s / (2.0 * bound));
                    const Vec9 d_raw = d_hsf;
                    d_pen = 2.0 * kPenaltyWeight * rel *
                            (sign * d_raw / bound -
                             (std::abs(raw_sf) / (bound * bound)) * d_bound);
                    d_hsf = sign * kClampFactor * d_bound;
                }
            } else {
                h_sf = raw_sf;
            }
        }

        path.h_s[t] = h_s;
        path.h_f[t] = h_f;
        path.h_sf[t] = h_sf;

        if (!req.density && !want_grad) continue;

        const double det = h_s * h_f - h_sf * h_sf;
        if (!(det > 0.0) || !(h_s > 0.0) || !(h_f > 0.0)) {
            throw Error(Errc::non_pd_matrix,
                        "conditional covariance not positive definite at step " +
                            std::to_string(t));
        }
        const double e_s = path.eps_s[t];
        const double e_f = path.eps_f[t];
        const double quad = (e_s * e_s * h_f - 2.0 * e_s * e_f * h_sf + e_f * e_f * h_s) / det;
        out.loglik += -kLog2Pi - 0.5 * std::log(det) - 0.5 * quad;

        if (want_grad) {
            const double w1 = (h_f * e_s - h_sf * e_f) / det;
            const double w2 = (h_s * e_f - h_sf * e_s) / det;
            const double m11 = -0.5 * (h_f / det - w1 * w1);
            const double m22 = -0.5 * (h_s / det - w2 * w2);
            const double m12 = -0.5 * (-h_sf / det - w1 * w2);

            Vec9 score = 2.0 * m12 * d_hsf - d_pen;
            score.segment<3>(0) += m11 * d_hs;
            score.segment<3>(3) += m22 * d_hf;
            out.grad += score;
            if (req.scores) out.scores.row(t) = score.transpose();
        }
    }

    out.loglik -= kPenaltyWeight * path.clamp_penalty;
    return out;
}

}  // namespace

void UniGarchParams::validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw Error(Errc::invalid_params, "omega must satisfy 0 < omega < inf");
    }
    if (alpha < 0.0 || beta < 0.0) {
        throw Error(Errc::invalid_params, "alpha and beta must be >= 0");
    }
    if (!(alpha + beta < 1.0)) {
        throw Error(Errc::invalid_params,
                    "persistence " + std::to_string(alpha + beta) + " not < 1");
    }
    if (!std::isfinite(mu)) {
        throw Error(Errc::invalid_params, "mu must be finite");
    }
}

void VechGarchParams::validate() const {
    if (!(s.omega > 0.0) || !(f.omega > 0.0)) {
        throw Error(Errc::invalid_params, "variance intercepts must be > 0");
    }
    check_equation(s, "cash equation", true);
    check_equation(f, "futures equation", true);
    check_equation(sf, "covariance equation", false);
    if (!std::isfinite(mu_s) || !std::isfinite(mu_f)) {
        throw Error(Errc::invalid_params, "means must be finite");
    }
}

const std::vector<std::string>& vech_param_names() {
    static const std::vector<std::string> names{"omega_s",  "alpha_s",  "beta_s",
                                                "omega_f",  "alpha_f",  "beta_f",
                                                "omega_sf", "alpha_sf", "beta_sf"};
    return names;
}

Eigen::VectorXd to_flat(const VechGarchParams& p) {
    Eigen::VectorXd v(kVechParamCount);
    v << p.s.omega, p.s.alpha, p.s.beta, p.f.omega, p.f.alpha, p.f.beta, p.sf.omega, p.sf.alpha,
        p.sf.beta;
    return v;
}

VechGarchParams from_flat(const Eigen::Ref<const Eigen::VectorXd>& v, double mu_s, double mu_f) {
    VechGarchParams p;
    p.s = {v[0], v[1], v[2]};
    p.f = {v[3], v[4], v[5]};
    p.sf = {v[6], v[7], v[8]};
    p.mu_s = mu_s;
    p.mu_f = mu_f;
    return p;
}

Eigen::VectorXd filter_univariate(const ReturnSeries& r, const UniGarchParams& p) {
    r.validate();
    p.validate();
    const Eigen::Index t_len = r.size();
    if (t_len < 1) throw Error(Errc::too_short, "empty series");

    Eigen::VectorXd sigma2(t_len);
    double h = p.unconditional_variance();
    sigma2[0] = h;
    for (Eigen::Index t = 1; t < t_len; ++t) {
        const double y = r.returns[t - 1] - p.mu;
        h = p.omega + p.alpha * y * y + p.beta * h;
        sigma2[t] = h;
    }
    return sigma2;
}

CovariancePath filter_vech(const AlignedPair& pair, const VechGarchParams& p,
                           std::optional<VechSeed> seed, bool pd_guard) {
    FilterRequest req;
    req.pd_guard = pd_guard;
    return run_vech_filter(pair, p, seed, req).path;
}

double loglik_vech(const AlignedPair& pair, const VechGarchParams& p, std::optional<VechSeed> seed,
                   bool pd_guard) {
    FilterRequest req;
    req.density = true;
    req.pd_guard = pd_guard;
    return run_vech_filter(pair, p, seed, req).loglik;
}

Eigen::VectorXd loglik_vech_gradient(const AlignedPair& pair, const VechGarchParams& p,
                                     std::optional<VechSeed> seed) {
    FilterRequest req;
    req.density = true;
    req.gradient = true;
    return run_vech_filter(pair, p, seed, req).grad;
}

Eigen::MatrixXd loglik_vech_scores(const AlignedPair& pair, const VechGarchParams& p,
                                   std::optional<VechSeed> seed) {
    FilterRequest req;
    req.density = true;
    req.gradient = true;
    req.scores = true;
    return run_vech_filter(pair, p, seed, req).scores;
}

double loglik_univariate(const ReturnSeries& r, const UniGarchParams& p) {
    const Eigen::VectorXd sigma2 = filter_univariate(r, p);
    double ll = 0.0;
    for (Eigen::Index t = 0; t < r.size(); ++t) {
        const double y = r.returns[t] - p.mu;
        ll += -0.5 * (kLog2Pi + std::log(sigma2[t]) + y * y / sigma2[t]);
    }
    return ll;
}

Eigen::MatrixXd loglik_univariate_scores(const ReturnSeries& r, const UniGarchParams& p) {
    r.validate();
    p.validate();
    const Eigen::Index t_len = r.size();
    if (t_len < 1) throw Error(Errc::too_short, "empty series");
    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(t_len, 3);

    const double persistence = p.alpha + p.beta;
    double h = p.unconditional_variance();
    // The seed depends on the parameters, so its derivative enters the chain.
    Eigen::Vector3d d_h(1.0 / (1.0 - persistence),
                        p.omega / ((1.0 - persistence) * (1.0 - persistence)),
                        p.omega / ((1.0 - persistence) * (1.0 - persistence)));
    for (Eigen::Index t = 0; t < t_len; ++t) {
        if (t > 0) {
            const double y_prev = r.returns[t - 1] - p.mu;
            const double h_prev = h;
            h = p.omega + p.alpha * y_prev * y_prev + p.beta * h_prev;
            d_h = Eigen::Vector3d(1.0, y_prev * y_prev, h_prev) + p.beta * d_h;
        }
        const double y = r.returns[t] - p.mu;
        const double dl_dh = -0.5 * (1.0 / h - y * y / (h * h));
        scores.row(t) = (dl_dh * d_h).transpose();
    }
    return scores;
}

Eigen::Vector3d loglik_univariate_gradient(const ReturnSeries& r, const UniGarchParams& p) {
    return loglik_univariate_scores(r, p).colwise().sum().transpose();
}

VechForecast forecast_one_step(const CovariancePath& path, const VechGarchParams& p) {
    p.validate();
    const Eigen::Index t_len = path.h_s.size();
    if (t_len < 1) throw Error(Errc::too_short, "empty covariance path");
    const Eigen::Index last = t_len - 1;
    const double u_s = path.eps_s[last] * path.eps_s[last];
    const double u_f = path.eps_f[last] * path.eps_f[last];
    const double u_sf = path.eps_s[last] * path.eps_f[last];

    VechForecast fc;
    fc.h_s = p.s.omega + p.s.alpha * u_s + p.s.beta * path.h_s[last];
    fc.h_f = p.f.omega + p.f.alpha * u_f + p.f.beta * path.h_f[last];
    fc.h_sf = p.sf.omega + p.sf.alpha * u_sf + p.sf.beta * path.h_sf[last];
    const double bound = std::sqrt(fc.h_s * fc.h_f);
    if (std::abs(fc.h_sf) > bound) {
        fc.h_sf = std::copysign(kClampFactor * bound, fc.h_sf);
    }
    return fc;
}

}  // namespace hedgescale::garch

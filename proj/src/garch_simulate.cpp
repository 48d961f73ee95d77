#include <cmath>

#include "hedgescale/errors.hpp"
#include "hedgescale/garch.hpp"
#include "hedgescale/rng.hpp"

namespace hedgescale::garch {

namespace {

constexpr double kClampFactor = 1.0 - 1e-8;

std::vector<Date> synthetic_dates(Eigen::Index n) {
    std::vector<Date> dates;
    dates.reserve(static_cast<std::size_t>(n));
    const Date start(2001, 1, 1);
    for (Eigen::Index i = 0; i < n; ++i) dates.push_back(start.plus_days(i));
    return dates;
}

}  // namespace

AlignedPair simulate_vech(const VechGarchParams& p, Eigen::Index t, std::uint64_t seed,
                          int burn_in) {
    p.validate();
    if (t < 1) throw Error(Errc::invalid_params, "simulation length must be >= 1");
    if (burn_in < 0) throw Error(Errc::invalid_params, "negative burn-in");

    Rng rng(seed);
    double h_s = p.s.omega / (1.0 - p.s.persistence());
    double h_f = p.f.omega / (1.0 - p.f.persistence());
    double h_sf = p.sf.omega / (1.0 - p.sf.persistence());

    Eigen::VectorXd r_s(t), r_f(t);
    const Eigen::Index total = t + burn_in;
    double eps_s = 0.0, eps_f = 0.0;
    for (Eigen::Index i = 0; i < total; ++i) {
        if (i > 0) {
            const double h_sf_prev = h_sf;
            const double u_s = eps_s * eps_s;
            const double u_f = eps_f * eps_f;
            const double u_sf = eps_s * eps_f;
            h_s = p.s.omega + p.s.alpha * u_s + p.s.beta * h_s;
            h_f = p.f.omega + p.f.alpha * u_f + p.f.beta * h_f;
            h_sf = p.sf.omega + p.sf.alpha * u_sf + p.sf.beta * h_sf_prev;
        }
        const double bound = std::sqrt(h_s * h_f);
        if (std::abs(h_sf) > bound) h_sf = std::copysign(kClampFactor * bound, h_sf);

        // Cholesky of the guarded 2x2 covariance.
        const double l11 = std::sqrt(h_s);
        const double l21 = h_sf / l11;
        const double l22 = std::sqrt(h_f - l21 * l21);
        const double z1 = rng.gaussian();
        const double z2 = rng.gaussian();
        eps_s = l11 * z1;
        eps_f = l21 * z1 + l22 * z2;

        if (i >= burn_in) {
            r_s[i - burn_in] = p.mu_s + eps_s;
            r_f[i - burn_in] = p.mu_f + eps_f;
        }
    }

    AlignedPair pair;
    pair.cash.label = "sim_cash";
    pair.futures.label = "sim_futures";
    pair.cash.frequency_h = pair.futures.frequency_h = 1;
    pair.cash.dates = pair.futures.dates = synthetic_dates(t);
    pair.cash.returns = std::move(r_s);
    pair.futures.returns = std::move(r_f);
    return pair;
}

ReturnSeries simulate_univariate(const UniGarchParams& p, Eigen::Index t, std::uint64_t seed,
                                 int burn_in) {
    p.validate();
    if (t < 1) throw Error(Errc::invalid_params, "simulation length must be >= 1");
    if (burn_in < 0) throw Error(Errc::invalid_params, "negative burn-in");

    Rng rng(seed);
    double h = p.unconditional_variance();
    double y = 0.0;
    Eigen::VectorXd r(t);
    const Eigen::Index total = t + burn_in;
    for (Eigen::Index i = 0; i < total; ++i) {
        if (i > 0) h = p.omega + p.alpha * y * y + p.beta * h;
        y = std::sqrt(h) * rng.gaussian();
        if (i >= burn_in) r[i - burn_in] = p.mu + y;
    }

    ReturnSeries out;
    out.label = "sim";
    out.frequency_h = 1;
    out.dates = synthetic_dates(t);
    out.returns = std::move(r);
    return out;
}

}  // namespace hedgescale::garch

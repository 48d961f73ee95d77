#include <doctest.h>

#include <cmath>

#include "hedgescale/data_ingest.hpp"
#include "hedgescale/errors.hpp"
#include "hedgescale/hedging.hpp"
#include "hedgescale/stats.hpp"
#include "oracles.hpp"

using namespace hedgescale;

TEST_CASE("ols_hedge closed forms") {
    const auto x = oracles::gaussian_vector(500, 31, 0.01);
    const auto self = oracles::make_pair(x, x);
    CHECK(hedge::ols_hedge(self).ratios[0] == doctest::Approx(1.0).epsilon(1e-12));

    // regression slope equals cov/var to machine precision
    const auto y = oracles::gaussian_vector(500, 32, 0.012);
    const auto pair = oracles::make_pair(x, y);
    const double slope =
        stats::covariance(pair.cash.returns, pair.futures.returns) /
        stats::variance(pair.futures.returns);
    Eigen::MatrixXd design(500, 2);
    design.col(0).setOnes();
    design.col(1) = pair.futures.returns;
    const auto fit = stats::ols(design, pair.cash.returns);
    CHECK(hedge::ols_hedge(pair).ratios[0] == doctest::Approx(slope).epsilon(1e-12));
    CHECK(fit.coef[1] == doctest::Approx(slope).epsilon(1e-9));

    // independent legs: ratio near zero
    const auto big = oracles::make_pair(oracles::gaussian_vector(100000, 33, 0.01),
                                        oracles::gaussian_vector(100000, 34, 0.01));
    CHECK(std::abs(hedge::ols_hedge(big).ratios[0]) <= 0.01);

    try {
        (void)hedge::ols_hedge(oracles::make_pair(x.head(10), Eigen::VectorXd::Constant(10, 0.01)));
        FAIL("expected DegenerateVariance");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_variance);
    }
}

TEST_CASE("garch_hedge ratio identities") {
    garch::CovariancePath path;
    path.dates = oracles::dates_from(4);
    path.h_s = Eigen::VectorXd::Constant(4, 2e-4);
    path.h_f = Eigen::VectorXd::Constant(4, 1.5e-4);
    path.h_sf = path.h_f;  // cov == futures variance -> beta == 1
    path.eps_s = Eigen::VectorXd::Zero(4);
    path.eps_f = Eigen::VectorXd::Zero(4);
    const auto hp = hedge::garch_hedge(path);
    CHECK((hp.ratios.array() == 1.0).all());

    // a clamped step keeps |beta_t| <= sqrt(h_s/h_f)
    path.h_sf[2] = std::sqrt(path.h_s[2] * path.h_f[2]) * (1.0 - 1e-8);
    const auto hp2 = hedge::garch_hedge(path);
    CHECK(std::abs(hp2.ratios[2]) <= std::sqrt(path.h_s[2] / path.h_f[2]));
}

TEST_CASE("scaled_hedge subsamples the base path at block starts") {
    // constant base path: the scaled path carries the same constant
    hedge::HedgePath base;
    base.kind = hedge::HedgeKind::ols;
    base.horizon_h = 1;
    base.dates = oracles::dates_from(40);
    base.ratios = Eigen::VectorXd::Constant(40, 0.907);
    std::vector<Date> targets{base.dates[9], base.dates[19], base.dates[29], base.dates[39]};
    const auto scaled = hedge::scaled_hedge(base, targets, 10);
    CHECK((scaled.ratios.array() == 0.907).all());
    CHECK(scaled.kind == hedge::HedgeKind::scaled_from_base);
    CHECK(scaled.horizon_h == 10);

    // varying base path: values are a subsequence of the base values,
    // taken at each block's first base date
    hedge::HedgePath garch_base = base;
    garch_base.kind = hedge::HedgeKind::garch;
    for (int i = 0; i < 40; ++i) garch_base.ratios[i] = 0.8 + 0.005 * i;
    const auto gs = hedge::scaled_hedge(garch_base, targets, 10);
    for (Eigen::Index k = 0; k < gs.ratios.size(); ++k) {
        CHECK(gs.ratios[k] == garch_base.ratios[10 * k]);  // block start, exact
        bool member = false;
        for (Eigen::Index j = 0; j < garch_base.ratios.size(); ++j) {
            if (gs.ratios[k] == garch_base.ratios[j]) member = true;
        }
        CHECK(member);
    }

    // h = 1 subsampling at every date is the identity
    const auto same = hedge::scaled_hedge(garch_base, garch_base.dates, 1);
    CHECK(same.ratios == garch_base.ratios);

    // mean of the subsampled path stays close to the base mean
    CHECK(std::abs(gs.ratios.mean() - garch_base.ratios.mean()) <= 0.03);

    // target period starting before the base grid
    std::vector<Date> too_early{base.dates[3]};
    try {
        (void)hedge::scaled_hedge(garch_base, too_early, 10);
        FAIL("expected NoPrecedingBaseDate");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::no_preceding_base_date);
    }
}

TEST_CASE("hedged_portfolio arithmetic") {
    const auto cash = oracles::gaussian_vector(300, 41, 0.01);
    const auto fut = oracles::gaussian_vector(300, 42, 0.011);
    const auto pair = oracles::make_pair(cash, fut);

    // beta = 0 leaves the cash return
    hedge::HedgePath zero;
    zero.kind = hedge::HedgeKind::ols;
    zero.horizon_h = 1;
    zero.dates = pair.cash.dates;
    zero.ratios = Eigen::VectorXd::Zero(300);
    const auto unhedged = hedge::hedged_portfolio(pair, zero, hedge::HedgeTiming::in_sample);
    CHECK(unhedged.returns == pair.cash.returns);

    // beta = 1 on identical legs is a perfect hedge
    const auto same = oracles::make_pair(cash, cash);
    const auto naive = hedge::naive_hedge(same.cash.dates);
    const auto perfect = hedge::hedged_portfolio(same, naive, hedge::HedgeTiming::in_sample);
    CHECK(perfect.returns.cwiseAbs().maxCoeff() == 0.0);

    // naive hedged variance equals var(r_s - r_f)
    const auto nv = hedge::hedged_portfolio(pair, hedge::naive_hedge(pair.cash.dates),
                                            hedge::HedgeTiming::in_sample);
    CHECK(stats::variance(nv.returns) ==
          doctest::Approx(stats::variance((cash - fut).eval())).epsilon(1e-12));

    // mismatched dates are rejected
    hedge::HedgePath misdated = zero;
    misdated.dates[0] = misdated.dates[0].plus_days(-1);
    CHECK_THROWS_AS((void)hedge::hedged_portfolio(pair, misdated, hedge::HedgeTiming::in_sample),
                    Error);
}

TEST_CASE("naive_hedge equals ols_hedge when cov equals futures variance") {
    // r_s = r_f + independent noise has cov(r_s, r_f) = var(r_f) in expectation;
    // construct exact equality instead: project the noise out
    const Eigen::VectorXd f = oracles::gaussian_vector(1000, 51, 0.01);
    Eigen::VectorXd noise = oracles::gaussian_vector(1000, 52, 0.004);
    // strip the sample covariance between noise and futures so cov(s, f) = var(f) exactly
    const double bias = stats::covariance(noise, f) / stats::variance(f);
    noise -= bias * f;
    const auto pair = oracles::make_pair(f + noise, f);
    const auto ols = hedge::ols_hedge(pair);
    CHECK(ols.ratios[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("in-sample ols variance beats every constant ratio on a grid") {
    const Eigen::VectorXd f = oracles::gaussian_vector(400, 61, 0.012);
    const Eigen::VectorXd s = 0.9 * f + oracles::gaussian_vector(400, 62, 0.004);
    const auto pair = oracles::make_pair(s, f);
    const auto ols = hedge::ols_hedge(pair);
    const auto hedged = hedge::hedged_portfolio(pair, ols, hedge::HedgeTiming::in_sample);
    const double best = stats::variance(hedged.returns);
    for (double beta = -2.0; beta <= 2.0 + 1e-9; beta += 0.01) {
        const Eigen::VectorXd alt = s - beta * f;
        CHECK(stats::variance(alt) >= best - 1e-18);
    }
}

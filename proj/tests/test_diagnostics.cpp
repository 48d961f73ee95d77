#include <doctest.h>

#include <cmath>

#include "hedgescale/data_ingest.hpp"
#include "hedgescale/diagnostics.hpp"
#include "hedgescale/errors.hpp"
#include "hedgescale/garch.hpp"
#include "hedgescale/stats.hpp"
#include "oracles.hpp"

using namespace hedgescale;

TEST_CASE("moments on degenerate and symmetric input") {
    const ReturnSeries constant = oracles::make_series(Eigen::VectorXd::Constant(50, 0.01));
    const auto rep = diag::moments(constant);
    CHECK(rep.sd_pct == 0.0);
    CHECK_FALSE(rep.excess_skewness.has_value());  // undefined -> not applicable
    CHECK_FALSE(rep.p_kurt.has_value());

    Eigen::VectorXd sym(100);
    for (int i = 0; i < 50; ++i) {
        sym[2 * i] = 0.02;
        sym[2 * i + 1] = -0.02;
    }
    const auto rep2 = diag::moments(oracles::make_series(sym));
    REQUIRE(rep2.excess_skewness.has_value());
    CHECK(*rep2.excess_skewness == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep2.mean_pct == doctest::Approx(0.0));
    CHECK(std::abs(rep2.sd_pct - 2.0) <= 0.02);
}

TEST_CASE("moments excess kurtosis near zero for simulated normal draws") {
    const auto rep = diag::moments(oracles::make_series(oracles::gaussian_vector(10000, 42)));
    REQUIRE(rep.excess_kurtosis.has_value());
    CHECK(std::abs(*rep.excess_kurtosis) < 0.15);
}

TEST_CASE("jarque_bera statistic and p-value") {
    // T/6 (S^2 + K^2/4) with moments reported by the stats layer
    const auto r = oracles::make_series(oracles::gaussian_vector(500, 9, 0.01));
    const double t = 500.0;
    const double s = stats::skewness(r.returns);
    const double k = stats::excess_kurtosis(r.returns);
    const auto res = diag::jarque_bera(r);
    CHECK(res.statistic == doctest::Approx(t / 6.0 * (s * s + k * k / 4.0)).epsilon(1e-12));

    // published equity-index moments give a statistic of the right magnitude
    const double ref = 2601.0 / 6.0 * (0.166 * 0.166 + 2.87 * 2.87 / 4.0);
    CHECK(ref == doctest::Approx(916.94).epsilon(0.15));

    // zero skewness and excess kurtosis -> statistic 0, p = 1
    CHECK(stats::chi_squared_cdf(0.0, 2.0) == 0.0);
}

TEST_CASE("jarque_bera invariant to affine rescaling") {
    const auto base = oracles::gaussian_vector(800, 13, 0.01);
    const auto r1 = diag::jarque_bera(oracles::make_series(base));
    const auto r2 = diag::jarque_bera(oracles::make_series(3.0 * base.array() + 0.005));
    CHECK(r1.statistic == doctest::Approx(r2.statistic).epsilon(1e-9));
}

TEST_CASE("jarque_bera keeps size under normality") {
    int fail_to_reject = 0;
    const int runs = 50;
    for (int s = 0; s < runs; ++s) {
        const auto r = oracles::make_series(
            oracles::gaussian_vector(5000, 100 + static_cast<std::uint64_t>(s), 0.012));
        const auto res = diag::jarque_bera(r);
        if (res.verdict == diag::Verdict::fail_to_reject) ++fail_to_reject;
    }
    CHECK(fail_to_reject >= static_cast<int>(0.9 * runs));
}

TEST_CASE("engle_lm detects conditional heteroskedasticity and nothing else") {
    int iid_fail_to_reject = 0;
    const int runs = 50;
    for (int s = 0; s < runs; ++s) {
        const auto r = oracles::make_series(
            oracles::gaussian_vector(2000, 500 + static_cast<std::uint64_t>(s), 0.01));
        if (diag::engle_lm(r, 4).verdict == diag::Verdict::fail_to_reject) ++iid_fail_to_reject;
    }
    CHECK(iid_fail_to_reject >= static_cast<int>(0.9 * runs));

    // strong ARCH process: commodity-like persistence with heavy alpha
    int rejects = 0;
    const int garch_runs = 40;
    for (int s = 0; s < garch_runs; ++s) {
        garch::UniGarchParams p{1.5e-4, 0.28, 0.41, 0.0};
        const ReturnSeries r =
            garch::simulate_univariate(p, 2500, 900 + static_cast<std::uint64_t>(s));
        const auto res = diag::engle_lm(r, 4);
        REQUIRE(res.p_value.has_value());
        if (*res.p_value < 0.01) ++rejects;
    }
    CHECK(rejects >= static_cast<int>(0.95 * garch_runs));

    try {
        (void)diag::engle_lm(oracles::make_series(Eigen::VectorXd::Constant(100, 0.01)), 4);
        FAIL("expected SingularRegression");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::singular_regression);
    }
}

TEST_CASE("engle_lm invariant to adding a constant") {
    const auto base = oracles::gaussian_vector(1500, 77, 0.01);
    const auto r1 = diag::engle_lm(oracles::make_series(base), 4);
    const auto r2 = diag::engle_lm(oracles::make_series(base.array() + 0.02), 4);
    CHECK(r1.statistic == doctest::Approx(r2.statistic).epsilon(1e-9));
}

TEST_CASE("kpss separates stationary series from random walks") {
    int below = 0;
    const int runs = 50;
    for (int s = 0; s < runs; ++s) {
        const auto r = oracles::make_series(
            oracles::gaussian_vector(2000, 2000 + static_cast<std::uint64_t>(s)));
        if (diag::kpss(r, diag::KpssVariant::constant).statistic < 0.739) ++below;
    }
    CHECK(below >= static_cast<int>(0.98 * runs));

    int above = 0;
    for (int s = 0; s < runs; ++s) {
        Eigen::VectorXd walk(2000);
        Rng rng(3000 + static_cast<std::uint64_t>(s));
        double level = 0.0;
        for (int t = 0; t < 2000; ++t) {
            level += rng.gaussian();
            walk[t] = level;
        }
        if (diag::kpss(oracles::make_series(walk), diag::KpssVariant::constant).statistic > 0.739)
            ++above;
    }
    CHECK(above >= static_cast<int>(0.95 * runs));
}

TEST_CASE("kpss critical values echoed exactly and sign-flip invariant") {
    const auto r = oracles::make_series(oracles::gaussian_vector(500, 5));
    const auto c = diag::kpss(r, diag::KpssVariant::constant);
    REQUIRE(c.critical_values.size() == 1);
    CHECK(c.critical_values[0].second == 0.739);
    const auto t = diag::kpss(r, diag::KpssVariant::trend);
    CHECK(t.critical_values[0].second == 0.216);

    const auto flipped = diag::kpss(oracles::make_series(-r.returns), diag::KpssVariant::constant);
    CHECK(flipped.statistic == doctest::Approx(c.statistic).epsilon(1e-12));
}

TEST_CASE("correlation basics and accuracy") {
    const auto x = oracles::gaussian_vector(500, 21, 0.01);
    const auto self = oracles::make_pair(x, x);
    CHECK(diag::correlation(self) == doctest::Approx(1.0).epsilon(1e-12));
    const auto anti = oracles::make_pair(x, -x);
    CHECK(diag::correlation(anti) == doctest::Approx(-1.0).epsilon(1e-12));

    // swapping legs leaves the value unchanged
    Eigen::VectorXd y = 0.8 * x + oracles::gaussian_vector(500, 22, 0.005);
    const auto ab = oracles::make_pair(x, y);
    const auto ba = oracles::make_pair(y, x);
    CHECK(diag::correlation(ab) == doctest::Approx(diag::correlation(ba)).epsilon(1e-14));

    // rho = 0.97 target within +-0.01 at T = 2500
    Rng rng(23);
    const double rho = 0.97;
    Eigen::VectorXd a(2500), b(2500);
    for (int i = 0; i < 2500; ++i) {
        const double z1 = rng.gaussian();
        const double z2 = rng.gaussian();
        a[i] = z1;
        b[i] = rho * z1 + std::sqrt(1.0 - rho * rho) * z2;
    }
    CHECK(std::abs(diag::correlation(oracles::make_pair(a, b)) - rho) <= 0.01);

    try {
        (void)diag::correlation(oracles::make_pair(Eigen::VectorXd::Constant(10, 0.01), x.head(10)));
        FAIL("expected DegenerateVariance");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_variance);
    }
}

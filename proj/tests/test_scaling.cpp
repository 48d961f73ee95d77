#include <doctest.h>

#include <cmath>

#include "hedgescale/errors.hpp"
#include "hedgescale/rng.hpp"
#include "hedgescale/scaling.hpp"

using namespace hedgescale;

TEST_CASE("sqrt_scale_sd reproduces the reference SD table") {
    // 1-period SDs (%) scaled to 5 and 20 periods, rounded to 2 decimals
    struct Row {
        double sd1;
        double want5;
        double want20;
    };
    const Row rows[] = {
        {1.11, 2.48, 4.96},  {1.18, 2.64, 5.28},   // equity cash/futures
        {2.34, 5.23, 10.46}, {2.21, 4.94, 9.88},   // commodity
        {0.48, 1.07, 2.15},  {0.51, 1.14, 2.28},   // fx
    };
    auto round2 = [](double x) { return std::round(x * 100.0) / 100.0; };
    for (const auto& row : rows) {
        CHECK(std::abs(round2(scaling::sqrt_scale_sd(row.sd1, 5)) - row.want5) <= 0.01 + 1e-12);
        CHECK(std::abs(round2(scaling::sqrt_scale_sd(row.sd1, 20)) - row.want20) <= 0.01 + 1e-12);
    }
    CHECK(scaling::sqrt_scale_sd(1.11, 1) == 1.11);
    CHECK_THROWS_AS((void)scaling::sqrt_scale_sd(-1.0, 5), Error);
}

TEST_CASE("scale_variance_cov is linear and ratio-preserving") {
    CHECK(scaling::scale_variance_cov(0.0, 7) == 0.0);
    CHECK(scaling::scale_variance_cov(1.2e-4, 20) == doctest::Approx(2.4e-3).epsilon(1e-14));
    // scaling variance and covariance by the same factor fixes their ratio
    const double cov = 1.1e-4, var = 1.3e-4;
    for (int h : {2, 5, 20}) {
        CHECK(scaling::scale_variance_cov(cov, h) / scaling::scale_variance_cov(var, h) ==
              doctest::Approx(cov / var).epsilon(1e-14));
    }
}

TEST_CASE("scaling_law generalizes the square-root rule") {
    scaling::ScalingLaw sqrt_law{1.0, 0.5, 2.0};
    Rng rng(12);
    for (int i = 0; i < 100; ++i) {
        const double sd = rng.uniform(0.001, 0.1);
        const int h = 1 + static_cast<int>(rng.bounded(40));
        CHECK(scaling::scaling_law(sd, static_cast<double>(h), sqrt_law) ==
              scaling::sqrt_scale_sd(sd, h));  // exact agreement at D = 0.5
    }
    scaling::ScalingLaw flat{1.0, 0.0, 2.0};
    CHECK(scaling::scaling_law(0.02, 250.0, flat) == 0.02);
    CHECK(scaling::scaling_law(0.02, 4.0, sqrt_law) == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(scaling::scaling_law(0.02, 1.0, sqrt_law) == 0.02);
}

TEST_CASE("dn_aggregate identity and degenerate cases") {
    const scaling::DnOutput id = scaling::dn_aggregate({2.5e-6, 0.0565, 0.9299, 5.87, 1});
    CHECK(id.omega_h == doctest::Approx(2.5e-6).epsilon(1e-12));
    CHECK(id.alpha_h == 0.0565);
    CHECK(id.beta_h == 0.9299);

    // i.i.d. input: variance scales linearly, no dynamics appear
    const scaling::DnOutput iid = scaling::dn_aggregate({1e-4, 0.0, 0.0, 3.0, 20});
    CHECK(iid.omega_h == doctest::Approx(20e-4).epsilon(1e-12));
    CHECK(iid.alpha_h == 0.0);
    CHECK(iid.beta_h == 0.0);

    try {
        (void)scaling::dn_aggregate({1e-6, 0.05, 0.90, 0.8, 5});
        FAIL("expected InvalidKappa");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_kappa);
    }
    CHECK_THROWS_AS((void)scaling::dn_aggregate({1e-6, 0.6, 0.5, 5.0, 5}), Error);
}

TEST_CASE("dn_aggregate persistence identities over a random grid") {
    Rng rng(99);
    for (int i = 0; i < 200; ++i) {
        const double alpha = rng.uniform(0.0, 0.30);
        const double beta = rng.uniform(0.0, 0.97 - alpha);
        const double omega = std::exp(rng.uniform(std::log(1e-7), std::log(1e-3)));
        const double kappa = rng.uniform(3.05, 9.0);
        const int h = 2 + static_cast<int>(rng.bounded(99));
        const scaling::DnOutput out = scaling::dn_aggregate({omega, alpha, beta, kappa, h});
        const double p_h = std::pow(alpha + beta, h);

        // alpha_h + beta_h = (alpha + beta)^h by construction of the root
        CHECK(std::abs(out.persistence() - p_h) <= 1e-12);
        CHECK(std::abs(out.beta_h) < 1.0);

        // h-period unconditional variance is h times the base variance
        const double uncond_h = out.omega_h / (1.0 - out.persistence());
        const double uncond_1 = omega / (1.0 - alpha - beta);
        CHECK(std::abs(uncond_h - h * uncond_1) <= 1e-10 * std::abs(h * uncond_1));
    }
}

TEST_CASE("dn_aggregate persistence decays monotonically and vanishes") {
    const double alpha = 0.0565, beta = 0.9299, kappa = 5.87;
    double prev = alpha + beta;
    for (int h : {2, 3, 5, 10, 20, 50, 100}) {
        const auto out = scaling::dn_aggregate({1e-6, alpha, beta, kappa, h});
        CHECK(out.persistence() < prev);
        prev = out.persistence();
    }
    // the limit is O(1/h^2): the persistent equity input needs h = 1e5 to
    // push both coefficients below 1e-6, the commodity input gets there at 1e4
    const auto far = scaling::dn_aggregate({1e-6, alpha, beta, kappa, 100000});
    CHECK(std::abs(far.alpha_h) < 1e-6);
    CHECK(std::abs(far.beta_h) < 1e-6);
    const auto far2 = scaling::dn_aggregate({2e-4, 0.2836, 0.4129, 8.07, 10000});
    CHECK(std::abs(far2.alpha_h) < 1e-6);
    CHECK(std::abs(far2.beta_h) < 1e-6);
}

TEST_CASE("dn_aggregate matches closed-form persistence of published inputs") {
    // commodity persistence 0.6965^20 ~ 0.0007
    const auto oil = scaling::dn_aggregate({2e-4, 0.2836, 0.4129, 8.07, 20});
    CHECK(oil.persistence() == doctest::Approx(std::pow(0.6965, 20)).epsilon(1e-9));
    CHECK(std::abs(oil.persistence() - 0.0007) <= 0.01);
}

TEST_CASE("dn_aggregate_vech applies per-equation kurtosis") {
    garch::VechGarchParams p;
    p.s = {1.68e-6, 0.0565, 0.9299};
    p.f = {2.20e-6, 0.0570, 0.9272};
    p.sf = {1.89e-6, 0.0561, 0.9290};
    const scaling::DnKappas kappas{5.87, 5.29};
    const auto scaled = scaling::dn_aggregate_vech(p, kappas, 5);

    const auto s = scaling::dn_aggregate({p.s.omega, p.s.alpha, p.s.beta, kappas.cash, 5});
    const auto f = scaling::dn_aggregate({p.f.omega, p.f.alpha, p.f.beta, kappas.futures, 5});
    const auto sf =
        scaling::dn_aggregate({p.sf.omega, p.sf.alpha, p.sf.beta, kappas.covariance(), 5});
    CHECK(scaled.s.alpha == s.alpha_h);
    CHECK(scaled.f.beta == f.beta_h);
    CHECK(scaled.sf.omega == sf.omega_h);
    CHECK(kappas.covariance() == doctest::Approx(0.5 * (5.87 + 5.29)));

    // symmetric inputs give symmetric outputs
    garch::VechGarchParams sym;
    sym.s = sym.f = sym.sf = {1e-6, 0.05, 0.90};
    const auto sym_out = scaling::dn_aggregate_vech(sym, {4.0, 4.0}, 5);
    CHECK(sym_out.s.alpha == sym_out.f.alpha);
    CHECK(sym_out.s.alpha == sym_out.sf.alpha);
    CHECK(sym_out.s.beta == sym_out.sf.beta);
}

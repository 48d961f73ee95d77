#include <doctest.h>

#include <cmath>

#include "hedgescale/effectiveness.hpp"
#include "hedgescale/errors.hpp"
#include "hedgescale/rng.hpp"
#include "oracles.hpp"

using namespace hedgescale;

TEST_CASE("risk_measures tail conventions") {
    // 99 small losses and one large one: the worst 1% is the single crash
    Eigen::VectorXd r = Eigen::VectorXd::Constant(100, -0.01);
    r[37] = -0.10;
    const auto rm = risk::risk_measures(r, 0.01);
    CHECK(rm.var_q == 0.10);
    CHECK(rm.cvar == 0.10);

    const auto zeros = risk::risk_measures(Eigen::VectorXd::Zero(100), 0.01);
    CHECK(zeros.variance == 0.0);
    CHECK(zeros.var_q == 0.0);
    CHECK(zeros.cvar == 0.0);

    // negating returns maps the upper return quantile into the loss VaR
    const auto x = oracles::gaussian_vector(500, 71, 0.01);
    const auto rm_neg = risk::risk_measures(-x, 0.01);
    std::vector<double> sorted(x.data(), x.data() + x.size());
    std::sort(sorted.begin(), sorted.end());
    CHECK(rm_neg.var_q == sorted[static_cast<std::size_t>(std::ceil(0.99 * 500))]);

    try {
        (void)risk::risk_measures(Eigen::VectorXd::Zero(50), 0.01);
        FAIL("expected TooShortForTail");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::too_short_for_tail);
    }
    // clamp_tail waives the length requirement
    CHECK_NOTHROW((void)risk::risk_measures(Eigen::VectorXd::Zero(50), 0.01, true));
}

TEST_CASE("risk_measures matches the brute-force oracle bit for bit") {
    Rng rng(81);
    for (int trial = 0; trial < 60; ++trial) {
        const Eigen::Index n = 100 + static_cast<Eigen::Index>(rng.bounded(401));
        Eigen::VectorXd r(n);
        for (Eigen::Index i = 0; i < n; ++i) r[i] = 0.02 * rng.gaussian();
        const auto rm = risk::risk_measures(r, 0.01);
        const auto oracle = oracles::tail_oracle(r, 0.01);
        CHECK(rm.var_q == oracle.var_q);
        CHECK(rm.cvar == oracle.cvar);
        CHECK(rm.variance == oracle.variance);
        CHECK(rm.cvar >= rm.var_q);  // tail mean dominates the threshold
    }
}

TEST_CASE("parametric-normal tail measures match Gaussian theory") {
    const Eigen::VectorXd r = oracles::gaussian_vector(200000, 303, 0.01);
    const auto rm = risk::risk_measures_parametric_normal(r, 0.01);
    const double sigma = std::sqrt(rm.variance);
    // z_{0.99} = 2.3263, phi(z)/alpha = 2.6652
    CHECK(std::abs(rm.var_q - 2.3263 * sigma) <= 0.02 * sigma);
    CHECK(std::abs(rm.cvar - 2.6652 * sigma) <= 0.02 * sigma);
    CHECK(rm.cvar > rm.var_q);
}

TEST_CASE("effectiveness ratios") {
    risk::RiskMeasures hedged{1e-5, 0.01, 0.012, 0.01};
    risk::RiskMeasures unhedged{2e-4, 0.03, 0.04, 0.01};
    const auto he = risk::effectiveness(hedged, unhedged);
    CHECK(he.he_variance == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(he.he_var == doctest::Approx(1.0 - 0.01 / 0.03).epsilon(1e-12));

    const auto same = risk::effectiveness(unhedged, unhedged);
    CHECK(same.he_variance == 0.0);
    CHECK(same.he_cvar == 0.0);

    risk::RiskMeasures perfect{0.0, 0.0, 0.0, 0.01};
    const auto full = risk::effectiveness(perfect, unhedged);
    CHECK(full.he_variance == 1.0);
    CHECK(full.he_cvar == 1.0);

    risk::RiskMeasures zero{0.0, 0.0, 0.0, 0.01};
    CHECK_THROWS_AS((void)risk::effectiveness(hedged, zero), Error);
}

TEST_CASE("effectiveness is scale invariant") {
    const Eigen::VectorXd u = oracles::gaussian_vector(600, 91, 0.012);
    const Eigen::VectorXd h = 0.25 * u + oracles::gaussian_vector(600, 92, 0.002);
    const auto he1 = risk::effectiveness(risk::risk_measures(h, 0.01),
                                         risk::risk_measures(u, 0.01));
    const double lambda = 7.5;
    const auto he2 = risk::effectiveness(risk::risk_measures((lambda * h).eval(), 0.01),
                                         risk::risk_measures((lambda * u).eval(), 0.01));
    CHECK(he1.he_variance == doctest::Approx(he2.he_variance).epsilon(1e-12));
    CHECK(he1.he_var == doctest::Approx(he2.he_var).epsilon(1e-12));
    CHECK(he1.he_cvar == doctest::Approx(he2.he_cvar).epsilon(1e-12));
}

TEST_CASE("block_effectiveness partitions and excludes degenerate baselines") {
    const Eigen::VectorXd u = oracles::gaussian_vector(400, 101, 0.01);
    const auto blocks = risk::block_effectiveness(u, u, 50, 0.01);
    CHECK(blocks.variance.size() == 8);
    CHECK(blocks.variance.cwiseAbs().maxCoeff() == 0.0);  // identical series -> HE 0
    CHECK(blocks.cvar.cwiseAbs().maxCoeff() == 0.0);

    try {
        (void)risk::block_effectiveness(u.head(60), u.head(60), 50, 0.01);
        FAIL("expected TooFewBlocks");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::too_few_blocks);
    }

    // mean of block HEs tracks the full-sample HE on smooth data
    const Eigen::VectorXd h = 0.3 * u + oracles::gaussian_vector(400, 102, 0.002);
    const auto b2 = risk::block_effectiveness(h, u, 50, 0.01);
    const auto full = risk::effectiveness(risk::risk_measures(h, 0.01),
                                          risk::risk_measures(u, 0.01));
    CHECK(std::abs(b2.variance.mean() - full.he_variance) <= 0.05);
}

TEST_CASE("bootstrap_diff_test basics") {
    const auto a = oracles::gaussian_vector(40, 111, 0.02, 0.8);
    const auto test_same = risk::bootstrap_diff_test(a, a, 500, 7);
    CHECK(test_same.t_stat == 0.0);
    CHECK_FALSE(test_same.significant_5pct);

    // constant separation with low noise: decisive rejection
    const Eigen::VectorXd b = a.array() + 0.1;
    const auto sep = risk::bootstrap_diff_test(b, a, 500, 7);
    CHECK(std::abs(sep.t_stat) > 10.0);
    CHECK(sep.significant_5pct);

    // deterministic per seed; a different seed moves the resampled SE
    // (checked on noisy diffs -- a constant diff has SE 0 under any seed)
    const Eigen::VectorXd noisy = a + oracles::gaussian_vector(40, 112, 0.03);
    const auto rep1 = risk::bootstrap_diff_test(noisy, a, 500, 7);
    const auto rep2 = risk::bootstrap_diff_test(noisy, a, 500, 7);
    CHECK(rep1.t_stat == rep2.t_stat);
    CHECK(rep1.bootstrap_se == rep2.bootstrap_se);
    const auto other = risk::bootstrap_diff_test(noisy, a, 500, 8);
    CHECK(other.bootstrap_se != rep1.bootstrap_se);

    CHECK_THROWS_AS((void)risk::bootstrap_diff_test(a.head(3), a.head(3), 100, 1), Error);
}

TEST_CASE("bootstrap_diff_test keeps its size under the null") {
    // quick version of the acceptance size check
    int rejections = 0;
    const int trials = 120;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(5000 + static_cast<std::uint64_t>(trial));
        Eigen::VectorXd a(40), b(40);
        for (int i = 0; i < 40; ++i) {
            a[i] = 0.8 + 0.05 * rng.gaussian();
            b[i] = 0.8 + 0.05 * rng.gaussian();
        }
        if (risk::bootstrap_diff_test(a, b, 400, 33 + static_cast<std::uint64_t>(trial))
                .significant_5pct)
            ++rejections;
    }
    const double rate = static_cast<double>(rejections) / trials;
    CHECK(rate > 0.005);
    CHECK(rate < 0.15);
}

#include "hedgescale/diagnostics.hpp"

#include <cmath>

#include "hedgescale/errors.hpp"
#include "hedgescale/stats.hpp"

namespace hedgescale::diag {

MomentReport moments(const ReturnSeries& r) {
    const Eigen::Index n = r.size();
    if (n < 4) throw Error(Errc::too_short, "moments needs >= 4 observations");
    const double t = static_cast<double>(n);

    MomentReport rep;
    rep.mean_pct = 100.0 * r.returns.mean();
    // A constant series has SD exactly 0; the two-pass formula can leave
    // roundoff dust from the mean subtraction.
    const bool constant = r.returns.maxCoeff() == r.returns.minCoeff();
    rep.sd_pct = constant ? 0.0 : 100.0 * std::sqrt(stats::variance(r.returns));

    const double skew = stats::skewness(r.returns);
    const double kurt = stats::excess_kurtosis(r.returns);
    if (std::isnan(skew) || std::isnan(kurt)) {
        return rep;  // degenerate series: moments undefined, fields stay absent
    }
    rep.excess_skewness = skew;
    rep.excess_kurtosis = kurt;
    rep.p_skew = 2.0 * (1.0 - stats::normal_cdf(std::abs(skew) / std::sqrt(6.0 / t)));
    rep.p_kurt = 2.0 * (1.0 - stats::normal_cdf(std::abs(kurt) / std::sqrt(24.0 / t)));
    return rep;
}

TestResult jarque_bera(const ReturnSeries& r, double significance) {
    const Eigen::Index n = r.size();
    if (n < 8) throw Error(Errc::too_short, "jarque_bera needs >= 8 observations");
    const double t = static_cast<double>(n);
    const double s = stats::skewness(r.returns);
    const double k = stats::excess_kurtosis(r.returns);

    TestResult res;
    if (std::isnan(s) || std::isnan(k)) {
        res.verdict = Verdict::not_applicable;
        return res;
    }
    res.statistic = t / 6.0 * (s * s + k * k / 4.0);
    res.p_value = 1.0 - stats::chi_squared_cdf(res.statistic, 2.0);
    res.verdict = (*res.p_value < significance) ? Verdict::reject : Verdict::fail_to_reject;
    return res;
}

TestResult engle_lm(const ReturnSeries& r, int lags, double significance) {
    const Eigen::Index n = r.size();
    if (lags < 1) throw Error(Errc::invalid_params, "lags must be >= 1");
    if (n <= lags + 1) throw Error(Errc::too_short, "engle_lm needs length > lags + 1");

    const Eigen::VectorXd e = r.returns.array() - r.returns.mean();
    const Eigen::VectorXd z = e.array().square();

    const Eigen::Index m = n - lags;  // usable regression rows
    Eigen::MatrixXd x(m, lags + 1);
    x.col(0).setOnes();
    for (int j = 1; j <= lags; ++j) {
        x.col(j) = z.segment(lags - j, m);
    }
    const Eigen::VectorXd y = z.tail(m);

    const auto fit = stats::ols(x, y);  // throws SingularRegression on rank loss

    TestResult res;
    res.statistic = static_cast<double>(m) * fit.r_squared;
    res.p_value = 1.0 - stats::chi_squared_cdf(res.statistic, static_cast<double>(lags));
    res.verdict = (*res.p_value < significance) ? Verdict::reject : Verdict::fail_to_reject;
    return res;
}

TestResult kpss(const ReturnSeries& r, KpssVariant variant, std::optional<int> bandwidth) {
    const Eigen::Index n = r.size();
    if (n < 20) throw Error(Errc::too_short, "kpss needs >= 20 observations");
    const double t = static_cast<double>(n);

    Eigen::VectorXd resid;
    if (variant == KpssVariant::constant) {
        resid = r.returns.array() - r.returns.mean();
    } else {
        Eigen::MatrixXd x(n, 2);
        x.col(0).setOnes();
        for (Eigen::Index i = 0; i < n; ++i) x(i, 1) = static_cast<double>(i + 1);
        const auto fit = stats::ols(x, r.returns);
        resid = r.returns - x * fit.coef;
    }

    Eigen::VectorXd partial(n);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        acc += resid[i];
        partial[i] = acc;
    }

    const int l = bandwidth.value_or(stats::newey_west_bandwidth(n));
    const double lrv = stats::bartlett_long_run_variance(resid, l);
    if (!(lrv > 0.0)) {
        throw Error(Errc::degenerate_variance, "zero long-run variance in kpss");
    }

    TestResult res;
    res.statistic = partial.squaredNorm() / (t * t) / lrv;
    const double cv = (variant == KpssVariant::constant) ? 0.739 : 0.216;
    res.critical_values.emplace_back(
        variant == KpssVariant::constant ? "1% (constant)" : "1% (trend)", cv);
    res.verdict = (res.statistic > cv) ? Verdict::reject : Verdict::fail_to_reject;
    return res;
}

double correlation(const AlignedPair& pair) {
    pair.validate();
    if (pair.size() < 2) throw Error(Errc::too_short, "correlation needs >= 2 observations");
    return stats::pearson_correlation(pair.cash.returns, pair.futures.returns);
}

}  // namespace hedgescale::diag

#include "hedgescale/stats.hpp"

#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <numbers>

#include "hedgescale/errors.hpp"

namespace hedgescale::stats {

double mean(const Ref<const VectorXd>& x) {
    if (x.size() == 0) throw Error(Errc::too_short, "mean of empty vector");
    return x.mean();
}

double variance(const Ref<const VectorXd>& x, bool bessel) {
    const Eigen::Index n = x.size();
    if (n < 2) throw Error(Errc::too_short, "variance needs >= 2 observations");
    const double m = x.mean();
    const double ss = (x.array() - m).square().sum();
    return ss / static_cast<double>(bessel ? n - 1 : n);
}

double covariance(const Ref<const VectorXd>& x, const Ref<const VectorXd>& y, bool bessel) {
    const Eigen::Index n = x.size();
    if (n != y.size()) throw Error(Errc::date_mismatch, "covariance length mismatch");
    if (n < 2) throw Error(Errc::too_short, "covariance needs >= 2 observations");
    const double mx = x.mean();
    const double my = y.mean();
    const double s = ((x.array() - mx) * (y.array() - my)).sum();
    return s / static_cast<double>(bessel ? n - 1 : n);
}

double skewness(const Ref<const VectorXd>& x) {
    const Eigen::Index n = x.size();
    if (n < 2) throw Error(Errc::too_short, "skewness needs >= 2 observations");
    if (x.maxCoeff() == x.minCoeff()) return std::numeric_limits<double>::quiet_NaN();
    const double m = x.mean();
    const auto d = x.array() - m;
    const double m2 = d.square().mean();
    if (m2 <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double m3 = d.cube().mean();
    return m3 / std::pow(m2, 1.5);
}

double excess_kurtosis(const Ref<const VectorXd>& x) {
    const Eigen::Index n = x.size();
    if (n < 2) throw Error(Errc::too_short, "kurtosis needs >= 2 observations");
    if (x.maxCoeff() == x.minCoeff()) return std::numeric_limits<double>::quiet_NaN();
    const double m = x.mean();
    const auto d = x.array() - m;
    const double m2 = d.square().mean();
    if (m2 <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double m4 = d.square().square().mean();
    return m4 / (m2 * m2) - 3.0;
}

double pearson_correlation(const Ref<const VectorXd>& x, const Ref<const VectorXd>& y) {
    const double vx = variance(x);
    const double vy = variance(y);
    if (!(vx > 0.0) || !(vy > 0.0)) {
        throw Error(Errc::degenerate_variance, "constant leg in correlation");
    }
    return covariance(x, y) / std::sqrt(vx * vy);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw Error(Errc::invalid_params, "normal_quantile needs p in (0, 1)");
    }
    // Acklam's rational approximation.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley refinement against the forward CDF.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

namespace {

// Lower incomplete gamma, series expansion (x < a + 1).
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma via Lentz continued fraction (x >= a + 1).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) {
        throw Error(Errc::invalid_params, "regularized_gamma_p domain");
    }
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi_squared_cdf(double x, double k) {
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * k, 0.5 * x);
}

OlsFit ols(const Eigen::MatrixXd& X, const Ref<const VectorXd>& y) {
    if (X.rows() != y.size()) throw Error(Errc::date_mismatch, "ols dimension mismatch");
    if (X.rows() < X.cols()) throw Error(Errc::too_short, "ols needs rows >= cols");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    OlsFit fit;
    fit.rank = qr.rank();
    if (fit.rank < X.cols()) {
        throw Error(Errc::singular_regression, "rank " + std::to_string(fit.rank) + " < " +
                                                   std::to_string(X.cols()) + " columns");
    }
    fit.coef = qr.solve(y);
    const VectorXd resid = y - X * fit.coef;
    fit.residual_ss = resid.squaredNorm();
    const double ym = y.mean();
    fit.total_ss = (y.array() - ym).square().sum();
    if (!(fit.total_ss > 0.0)) {
        throw Error(Errc::singular_regression, "dependent variable is constant");
    }
    fit.r_squared = 1.0 - fit.residual_ss / fit.total_ss;
    return fit;
}

double bartlett_long_run_variance(const Ref<const VectorXd>& e, int bandwidth) {
    const Eigen::Index n = e.size();
    if (n < 2) throw Error(Errc::too_short, "long-run variance needs >= 2 observations");
    if (bandwidth < 0) throw Error(Errc::invalid_params, "negative bandwidth");
    const double t = static_cast<double>(n);
    double lrv = e.squaredNorm() / t;
    for (int j = 1; j <= bandwidth && j < n; ++j) {
        const double gamma_j = (e.head(n - j).array() * e.tail(n - j).array()).sum() / t;
        const double w = 1.0 - static_cast<double>(j) / (static_cast<double>(bandwidth) + 1.0);
        lrv += 2.0 * w * gamma_j;
    }
    return lrv;
}

int newey_west_bandwidth(Eigen::Index t) {
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(t) / 100.0, 0.25)));
}

}  // namespace hedgescale::stats

#pragma once

#include <Eigen/Core>

namespace hedgescale::stats {

using Eigen::Ref;
using Eigen::VectorXd;

[[nodiscard]] double mean(const Ref<const VectorXd>& x);

/// Sample variance; Bessel (T-1) by default, 1/T when bessel is false.
[[nodiscard]] double variance(const Ref<const VectorXd>& x, bool bessel = true);

[[nodiscard]] double covariance(const Ref<const VectorXd>& x, const Ref<const VectorXd>& y,
                                bool bessel = true);

/// Standardized third central moment m3 / m2^(3/2) with 1/T moments.
[[nodiscard]] double skewness(const Ref<const VectorXd>& x);

/// m4 / m2^2 - 3 with 1/T moments.
[[nodiscard]] double excess_kurtosis(const Ref<const VectorXd>& x);

[[nodiscard]] double pearson_correlation(const Ref<const VectorXd>& x,
                                         const Ref<const VectorXd>& y);

/// Standard normal CDF.
[[nodiscard]] double normal_cdf(double z);

/// Inverse standard normal CDF (Acklam's rational approximation, refined by
/// one Halley step; |error| < 1e-12 on (0, 1)).
[[nodiscard]] double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x); series + continued fraction.
[[nodiscard]] double regularized_gamma_p(double a, double x);

/// Chi-squared CDF with k degrees of freedom.
[[nodiscard]] double chi_squared_cdf(double x, double k);

struct OlsFit {
    Eigen::VectorXd coef;
    double r_squared = 0.0;
    Eigen::Index rank = 0;
    double residual_ss = 0.0;
    double total_ss = 0.0;  // centered when the model has an intercept column
};

/// Least squares of y on X (X includes any intercept column). r_squared uses
/// the centered total sum of squares.
[[nodiscard]] OlsFit ols(const Eigen::MatrixXd& X, const Ref<const VectorXd>& y);

/// Bartlett-kernel long-run variance of e with the given lag truncation:
/// gamma_0 + 2 sum_{j<=l} (1 - j/(l+1)) gamma_j, gammas scaled by 1/T.
[[nodiscard]] double bartlett_long_run_variance(const Ref<const VectorXd>& e, int bandwidth);

/// Newey-West automatic truncation floor(4 (T/100)^(1/4)).
[[nodiscard]] int newey_west_bandwidth(Eigen::Index t);

}  // namespace hedgescale::stats

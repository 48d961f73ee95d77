#pragma once

#include "hedgescale/garch.hpp"

namespace hedgescale::scaling {

/// sd * sqrt(h): the square-root-of-time rule for standard deviations.
[[nodiscard]] double sqrt_scale_sd(double sd, int h);

/// v * h: variances and covariances both scale linearly in the horizon under
/// i.i.d. returns, which leaves their ratio (the hedge ratio) unchanged.
[[nodiscard]] double scale_variance_cov(double v, int h);

/// Empirical scaling law sd(dt) = c * dt^D; D = 0.5 recovers the square-root
/// rule, D = 0 a horizon-independent volatility.
struct ScalingLaw {
    double c = 1.0;  // asset-dependent constant
    double d = 0.5;  // drift exponent
    double p = 2.0;  // moment order the law was calibrated on

    void validate() const;
};

/// Scale sd_base across a horizon ratio using the law's exponent. The
/// constant is calibrated so dt_ratio = 1 returns sd_base; D = 0.5 agrees
/// with sqrt_scale_sd exactly.
[[nodiscard]] double scaling_law(double sd_base, double dt_ratio, const ScalingLaw& law);

/// Inputs of the weak-GARCH(1,1) temporal aggregation: one (omega, alpha,
/// beta) triple, the kurtosis of the base-frequency series, and the horizon.
/// alpha + beta < 1 and kappa > 1 are required; omega may be any sign so the
/// covariance equation of a vech model can be aggregated with the same code.
struct DnInput {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double kappa = 3.0;
    int h = 1;

    void validate() const;
};

struct DnOutput {
    double omega_h = 0.0;
    double alpha_h = 0.0;
    double beta_h = 0.0;

    [[nodiscard]] double persistence() const { return alpha_h + beta_h; }
};

/// Closed-form h-period parameters of an aggregated weak GARCH(1,1):
///   omega_h = h omega (1 - p^h) / (1 - p),            p = alpha + beta
///   beta_h  = the |root| < 1 of  r b^2 - b + r = 0,   r from the kurtosis-
///             dependent a, b moments (beta_h = 2r / (1 + sqrt(1 - 4 r^2)),
///             which is 0 at r = 0 by continuity)
///   alpha_h = p^h - beta_h
/// Throws NoRealRoot when |r| > 1/2 (the parameter/kurtosis combination is
/// outside the aggregation domain) and InvalidKappa for kappa <= 1.
[[nodiscard]] DnOutput dn_aggregate(const DnInput& input);

/// Per-leg kurtosis inputs for aggregating a full vech parameter set. The
/// covariance equation has no kurtosis of its own; the mean of the two legs
/// is used (a modeling choice, echoed by the CLI).
struct DnKappas {
    double cash = 3.0;
    double futures = 3.0;

    [[nodiscard]] double covariance() const { return 0.5 * (cash + futures); }
};

/// Element-wise aggregation of the three vech equations. Mean returns scale
/// linearly with the horizon.
[[nodiscard]] garch::VechGarchParams dn_aggregate_vech(const garch::VechGarchParams& p,
                                                       const DnKappas& kappas, int h);

}  // namespace hedgescale::scaling

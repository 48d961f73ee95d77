#include "hedgescale/scaling.hpp"

#include <cmath>
#include <string>

#include "hedgescale/errors.hpp"

namespace hedgescale::scaling {

double sqrt_scale_sd(double sd, int h) {
    if (sd < 0.0) throw Error(Errc::invalid_params, "negative standard deviation");
    if (h < 1) throw Error(Errc::invalid_params, "h must be >= 1");
    return sd * std::sqrt(static_cast<double>(h));
}

double scale_variance_cov(double v, int h) {
    if (h < 1) throw Error(Errc::invalid_params, "h must be >= 1");
    return v * static_cast<double>(h);
}

void ScalingLaw::validate() const {
    if (!(c > 0.0)) throw Error(Errc::invalid_params, "scaling-law constant must be > 0");
    if (!(p > 0.0)) throw Error(Errc::invalid_params, "moment order must be > 0");
    if (!std::isfinite(d)) throw Error(Errc::invalid_params, "drift exponent must be finite");
}

double scaling_law(double sd_base, double dt_ratio, const ScalingLaw& law) {
    law.validate();
    if (!(dt_ratio > 0.0)) throw Error(Errc::invalid_params, "dt_ratio must be > 0");
    // Exact agreement with sqrt_scale_sd at D = 0.5 (pow(x, 0.5) is not
    // guaranteed to equal sqrt(x) on every libm).
    if (law.d == 0.5) return sd_base * std::sqrt(dt_ratio);
    return sd_base * std::pow(dt_ratio, law.d);
}

void DnInput::validate() const {
    if (!std::isfinite(omega)) throw Error(Errc::invalid_params, "omega must be finite");
    if (alpha < 0.0 || beta < 0.0) {
        throw Error(Errc::invalid_params, "alpha and beta must be >= 0");
    }
    if (!(alpha + beta < 1.0)) {
        throw Error(Errc::invalid_params,
                    "persistence " + std::to_string(alpha + beta) + " not < 1");
    }
    if (!(kappa > 1.0)) {
        throw Error(Errc::invalid_kappa, "kurtosis " + std::to_string(kappa) + " not > 1");
    }
    if (h < 1) throw Error(Errc::invalid_params, "h must be >= 1");
}

DnOutput dn_aggregate(const DnInput& input) {
    input.validate();
    const double alpha = input.alpha;
    const double beta = input.beta;
    const double p = alpha + beta;
    const double h = static_cast<double>(input.h);
    const double p_h = std::pow(p, h);

    DnOutput out;
    out.omega_h = (p < 1.0 && p > 0.0)
                      ? h * input.omega * (1.0 - p_h) / (1.0 - p)
                      : h * input.omega;  // p = 0: the sum collapses to h terms of omega

    if (input.h == 1) {
        out.alpha_h = alpha;
        out.beta_h = beta;
        return out;
    }
    if (p == 0.0) {
        out.alpha_h = 0.0;
        out.beta_h = 0.0;
        return out;
    }

    const double p2 = p * p;
    const double p_2h = p_h * p_h;
    const double gamma = alpha - beta * alpha * p;  // alpha (1 - beta p)

    double a = h * (1.0 - beta) * (1.0 - beta);
    a += 2.0 * h * (h - 1.0) * ((1.0 - p) * (1.0 - p) * (1.0 - beta * beta - 2.0 * beta * alpha)) /
         ((input.kappa - 1.0) * (1.0 - p2));
    a += 4.0 * ((h - 1.0 - h * p + p_h) * gamma) / (1.0 - p2);
    const double b = gamma * (1.0 - p_2h) / (1.0 - p2);

    const double denom = a * (1.0 + p_2h) - 2.0 * b;
    if (denom == 0.0) {
        throw Error(Errc::no_real_root, "degenerate quadratic (a=" + std::to_string(a) +
                                            ", b=" + std::to_string(b) + ")");
    }
    const double r = (a * p_h - b) / denom;
    if (std::abs(r) > 0.5) {
        throw Error(Errc::no_real_root,
                    "|r| = " + std::to_string(std::abs(r)) + " > 1/2 (a=" + std::to_string(a) +
                        ", b=" + std::to_string(b) + ", kappa=" + std::to_string(input.kappa) +
                        ", h=" + std::to_string(input.h) + ")");
    }
    // Smaller root of r b^2 - b + r = 0, written to stay stable as r -> 0.
    out.beta_h = 2.0 * r / (1.0 + std::sqrt(1.0 - 4.0 * r * r));
    out.alpha_h = p_h - out.beta_h;
    return out;
}

garch::VechGarchParams dn_aggregate_vech(const garch::VechGarchParams& p, const DnKappas& kappas,
                                         int h) {
    p.validate();
    auto aggregate_eq = [&](const garch::GarchEquation& eq, double kappa) {
        const DnOutput out = dn_aggregate({eq.omega, eq.alpha, eq.beta, kappa, h});
        return garch::GarchEquation{out.omega_h, out.alpha_h, out.beta_h};
    };
    garch::VechGarchParams scaled;
    scaled.s = aggregate_eq(p.s, kappas.cash);
    scaled.f = aggregate_eq(p.f, kappas.futures);
    scaled.sf = aggregate_eq(p.sf, kappas.covariance());
    scaled.mu_s = p.mu_s * static_cast<double>(h);
    scaled.mu_f = p.mu_f * static_cast<double>(h);
    return scaled;
}

}  // namespace hedgescale::scaling

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hedgescale/series.hpp"

namespace hedgescale::garch {

/// Univariate GARCH(1,1): sigma2_t = omega + alpha y_{t-1}^2 + beta sigma2_{t-1},
/// residuals y = r - mu. Stationarity requires alpha + beta < 1.
struct UniGarchParams {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double mu = 0.0;

    void validate() const;
    [[nodiscard]] double persistence() const { return alpha + beta; }
    [[nodiscard]] double unconditional_variance() const { return omega / (1.0 - alpha - beta); }
};

/// One equation of the diagonal vech recursion.
struct GarchEquation {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    [[nodiscard]] double persistence() const { return alpha + beta; }
};

/// Diagonal vech GARCH(1,1): each element of the 2x2 conditional covariance
/// follows its own scalar recursion. The covariance intercept omega_sf may
/// take any sign; non-negativity is required only for the variance equations.
struct VechGarchParams {
    GarchEquation s;   // cash variance
    GarchEquation f;   // futures variance
    GarchEquation sf;  // covariance
    double mu_s = 0.0;
    double mu_f = 0.0;

    void validate() const;
};

/// Canonical flat ordering used for gradients and standard errors:
/// [omega_s, alpha_s, beta_s, omega_f, alpha_f, beta_f, omega_sf, alpha_sf, beta_sf].
inline constexpr int kVechParamCount = 9;
[[nodiscard]] const std::vector<std::string>& vech_param_names();
[[nodiscard]] Eigen::VectorXd to_flat(const VechGarchParams& p);
[[nodiscard]] VechGarchParams from_flat(const Eigen::Ref<const Eigen::VectorXd>& v, double mu_s,
                                        double mu_f);

/// Filtered conditional (co)variance path with the residuals that drove it.
/// h_sf is the guarded covariance: whenever the raw recursion exceeds the
/// positive-definiteness bound sqrt(h_s h_f) it is clamped to
/// +-(1 - 1e-8) sqrt(h_s h_f) and the squared relative excess is accumulated
/// into clamp_penalty (which the likelihood subtracts, scaled).
struct CovariancePath {
    std::vector<Date> dates;
    Eigen::VectorXd h_s;
    Eigen::VectorXd h_f;
    Eigen::VectorXd h_sf;
    Eigen::VectorXd eps_s;
    Eigen::VectorXd eps_f;
    double clamp_penalty = 0.0;
    int clamped_steps = 0;
};

struct VechSeed {
    double h_s = 0.0;
    double h_f = 0.0;
    double h_sf = 0.0;
};

/// Variance path of the univariate recursion, seeded at the unconditional
/// variance omega / (1 - alpha - beta).
[[nodiscard]] Eigen::VectorXd filter_univariate(const ReturnSeries& r, const UniGarchParams& p);

/// Run the three vech recursions in lockstep. Seeds default to the sample
/// moments of the pair's residuals (1/T scaling); pass `seed` to override,
/// e.g. when re-filtering a holdout continuation with estimation-window state.
[[nodiscard]] CovariancePath filter_vech(const AlignedPair& pair, const VechGarchParams& p,
                                         std::optional<VechSeed> seed = std::nullopt,
                                         bool pd_guard = true);

/// Gaussian log-likelihood of the pair under the guarded path, minus the
/// clamp penalty. With pd_guard disabled a non-positive-definite step throws
/// NonPDMatrix instead.
[[nodiscard]] double loglik_vech(const AlignedPair& pair, const VechGarchParams& p,
                                 std::optional<VechSeed> seed = std::nullopt,
                                 bool pd_guard = true);

/// Analytic gradient of loglik_vech in the canonical flat ordering.
[[nodiscard]] Eigen::VectorXd loglik_vech_gradient(const AlignedPair& pair,
                                                   const VechGarchParams& p,
                                                   std::optional<VechSeed> seed = std::nullopt);

/// Per-observation score rows (T x 9), used for the QMLE sandwich.
[[nodiscard]] Eigen::MatrixXd loglik_vech_scores(const AlignedPair& pair,
                                                 const VechGarchParams& p,
                                                 std::optional<VechSeed> seed = std::nullopt);

[[nodiscard]] double loglik_univariate(const ReturnSeries& r, const UniGarchParams& p);
[[nodiscard]] Eigen::Vector3d loglik_univariate_gradient(const ReturnSeries& r,
                                                         const UniGarchParams& p);
[[nodiscard]] Eigen::MatrixXd loglik_univariate_scores(const ReturnSeries& r,
                                                       const UniGarchParams& p);

struct VechForecast {
    double h_s = 0.0;
    double h_f = 0.0;
    double h_sf = 0.0;
};

/// Advance each recursion one step past the end of the path using the final
/// residual products and final (guarded) H; the guard is applied to the
/// forecast as well, so appending the realized observation and re-filtering
/// with the same seed reproduces it exactly.
[[nodiscard]] VechForecast forecast_one_step(const CovariancePath& path, const VechGarchParams& p);

/// Simulate the bivariate process: Gaussian shocks with conditional
/// covariance from the guarded recursion, `burn_in` steps discarded.
/// Deterministic per (seed, t); dates are sequential synthetic days.
[[nodiscard]] AlignedPair simulate_vech(const VechGarchParams& p, Eigen::Index t,
                                        std::uint64_t seed, int burn_in = 500);

[[nodiscard]] ReturnSeries simulate_univariate(const UniGarchParams& p, Eigen::Index t,
                                               std::uint64_t seed, int burn_in = 500);

struct EstimateOptions {
    int min_observations = 100;
    double grad_tol = 1e-6;       // on the transformed scale
    int max_iterations = 600;
    int multistarts = 3;          // jittered restarts after a failed first run
    std::uint64_t jitter_seed = 7;
    bool estimate_means_jointly = false;  // default is two-step with sample means
    bool compute_standard_errors = true;  // rolling refits skip the Hessian work
};

struct UniEstimationResult {
    UniGarchParams params;
    double loglik = 0.0;
    Eigen::Vector3d plain_se = Eigen::Vector3d::Zero();   // [omega, alpha, beta]
    Eigen::Vector3d robust_se = Eigen::Vector3d::Zero();
    bool converged = false;
    int iterations = 0;
};

struct VechEstimationResult {
    VechGarchParams params;
    double loglik = 0.0;
    Eigen::VectorXd plain_se;   // canonical flat ordering
    Eigen::VectorXd robust_se;
    bool converged = false;
    int iterations = 0;
};

/// Gaussian (Q)MLE of the diagonal vech model. Means are the sample means,
/// held fixed while the variance parameters are optimized over transformed
/// unconstrained coordinates (log intercepts for the variance equations, a
/// scaled linear coordinate for the covariance intercept, logistic maps
/// keeping alpha, beta >= 0 and alpha + beta < 1 per equation); quasi-Newton
/// with a simplex fallback and jittered multi-starts. NonConvergence is
/// reported through `converged`, never thrown. Throws DegenerateData for
/// constant legs or fewer than min_observations observations.
[[nodiscard]] VechEstimationResult estimate_vech(const AlignedPair& pair,
                                                 std::optional<VechGarchParams> init = std::nullopt,
                                                 const EstimateOptions& opts = {});

[[nodiscard]] UniEstimationResult estimate_univariate(
    const ReturnSeries& r, std::optional<UniGarchParams> init = std::nullopt,
    const EstimateOptions& opts = {});

}  // namespace hedgescale::garch

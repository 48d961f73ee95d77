#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace hedgescale::risk {

/// Variance plus empirical tail measures of the loss distribution L = -r.
/// var_q is the order statistic of sorted losses at zero-based index
/// ceil((1 - alpha) n) -- the smallest loss of the worst alpha tail -- and
/// cvar averages every loss at or above it.
struct RiskMeasures {
    double variance = 0.0;
    double var_q = 0.0;
    double cvar = 0.0;
    double alpha_level = 0.01;
};

/// Throws TooShortForTail when n < ceil(1/alpha) (no tail observation).
/// With clamp_tail the length requirement is waived and the tail index is
/// clamped to the largest loss instead, matching the per-block convention;
/// reports over short holdout windows use this mode.
[[nodiscard]] RiskMeasures risk_measures(const Eigen::Ref<const Eigen::VectorXd>& returns,
                                         double alpha = 0.01, bool clamp_tail = false);

/// Comparison-only alternative: Gaussian VaR/CVaR from the sample mean and
/// standard deviation instead of order statistics. Variance is unchanged.
[[nodiscard]] RiskMeasures risk_measures_parametric_normal(
    const Eigen::Ref<const Eigen::VectorXd>& returns, double alpha = 0.01);

struct EffectivenessReport {
    double he_variance = 0.0;
    double he_var = 0.0;
    double he_cvar = 0.0;
};

/// Percentage risk reduction 1 - hedged/unhedged per measure. Throws
/// ZeroBaselineRisk when any unhedged measure is not > 0.
[[nodiscard]] EffectivenessReport effectiveness(const RiskMeasures& hedged,
                                                const RiskMeasures& unhedged);

/// Per-block effectiveness series for inference. Blocks are non-overlapping,
/// forward-anchored, the trailing partial block dropped. Within a block the
/// tail index is clamped to the largest loss when ceil((1-alpha) n) runs off
/// the end. Blocks whose unhedged measure is not > 0 are excluded from that
/// measure's series (the exclusion depends only on the unhedged leg, so
/// pairing across strategies is preserved).
struct BlockEffectiveness {
    Eigen::VectorXd variance;
    Eigen::VectorXd var_q;
    Eigen::VectorXd cvar;
    int block_len = 0;
};

[[nodiscard]] BlockEffectiveness block_effectiveness(
    const Eigen::Ref<const Eigen::VectorXd>& hedged,
    const Eigen::Ref<const Eigen::VectorXd>& unhedged, int block_len, double alpha = 0.01);

struct DiffTest {
    double t_stat = 0.0;
    double bootstrap_se = 0.0;
    int n_resamples = 0;
    bool significant_5pct = false;
};

/// Paired bootstrap t-test of mean(he_a) - mean(he_b): block indices are
/// resampled with replacement (the same indices for both series) and the
/// standard error is the standard deviation of the resampled mean
/// difference. Deterministic per seed; each resample draws from its own
/// counter-based substream, so the result is independent of evaluation order.
[[nodiscard]] DiffTest bootstrap_diff_test(const Eigen::Ref<const Eigen::VectorXd>& he_a,
                                           const Eigen::Ref<const Eigen::VectorXd>& he_b,
                                           int n_resamples, std::uint64_t seed);

}  // namespace hedgescale::risk

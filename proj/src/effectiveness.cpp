#include "hedgescale/effectiveness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "hedgescale/errors.hpp"
#include "hedgescale/rng.hpp"
#include "hedgescale/stats.hpp"

namespace hedgescale::risk {

namespace {

constexpr double kNormal5pct = 1.9599639845400545;  // two-sided 5% critical value

struct TailPair {
    double var_q;
    double cvar;
};

/// Tail measures from ascending sorted losses. The cvar mean accumulates in
/// ascending order so an independent sort-based oracle reproduces it bitwise.
TailPair tail_measures(const std::vector<double>& sorted_losses, double alpha) {
    const std::size_t n = sorted_losses.size();
    const double pos = (1.0 - alpha) * static_cast<double>(n);
    std::size_t k = static_cast<std::size_t>(std::ceil(pos));
    if (k >= n) k = n - 1;
    const double var_q = sorted_losses[k];

    const auto first =
        std::lower_bound(sorted_losses.begin(), sorted_losses.end(), var_q);
    double sum = 0.0;
    std::size_t count = 0;
    for (auto it = first; it != sorted_losses.end(); ++it) {
        sum += *it;
        ++count;
    }
    return {var_q, sum / static_cast<double>(count)};
}

}  // namespace

RiskMeasures risk_measures(const Eigen::Ref<const Eigen::VectorXd>& returns, double alpha,
                           bool clamp_tail) {
    if (!(alpha > 0.0) || !(alpha < 0.5)) {
        throw Error(Errc::invalid_params, "tail alpha must be in (0, 0.5)");
    }
    const Eigen::Index n = returns.size();
    const auto min_n = static_cast<Eigen::Index>(std::ceil(1.0 / alpha));
    if (n < min_n && !clamp_tail) {
        throw Error(Errc::too_short_for_tail, "need >= " + std::to_string(min_n) +
                                                  " observations for alpha = " +
                                                  std::to_string(alpha));
    }
    if (n < 2) {
        throw Error(Errc::too_short_for_tail, "need >= 2 observations");
    }

    std::vector<double> losses(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) losses[static_cast<std::size_t>(i)] = -returns[i];
    std::sort(losses.begin(), losses.end());

    RiskMeasures rm;
    rm.alpha_level = alpha;
    // Sequential two-pass variance: SIMD-reassociated sums would break the
    // bit-level agreement with the sort-based reference implementation.
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) sum += returns[i];
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ss += (returns[i] - mean) * (returns[i] - mean);
    rm.variance = ss / static_cast<double>(n - 1);
    const TailPair tail = tail_measures(losses, alpha);
    rm.var_q = tail.var_q;
    rm.cvar = tail.cvar;
    return rm;
}

RiskMeasures risk_measures_parametric_normal(const Eigen::Ref<const Eigen::VectorXd>& returns,
                                             double alpha) {
    if (!(alpha > 0.0) || !(alpha < 0.5)) {
        throw Error(Errc::invalid_params, "tail alpha must be in (0, 0.5)");
    }
    if (returns.size() < 2) {
        throw Error(Errc::too_short_for_tail, "need >= 2 observations");
    }
    const double mu = returns.mean();
    const double sigma = std::sqrt(stats::variance(returns));
    const double z = stats::normal_quantile(1.0 - alpha);

    RiskMeasures rm;
    rm.alpha_level = alpha;
    rm.variance = sigma * sigma;
    rm.var_q = -mu + sigma * z;
    // Gaussian expected shortfall: E[L | L >= VaR] = -mu + sigma phi(z)/alpha
    const double phi_z =
        std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    rm.cvar = -mu + sigma * phi_z / alpha;
    return rm;
}

EffectivenessReport effectiveness(const RiskMeasures& hedged, const RiskMeasures& unhedged) {
    if (!(unhedged.variance > 0.0) || !(unhedged.var_q > 0.0) || !(unhedged.cvar > 0.0)) {
        throw Error(Errc::zero_baseline_risk, "unhedged risk measures must be > 0");
    }
    EffectivenessReport rep;
    rep.he_variance = 1.0 - hedged.variance / unhedged.variance;
    rep.he_var = 1.0 - hedged.var_q / unhedged.var_q;
    rep.he_cvar = 1.0 - hedged.cvar / unhedged.cvar;
    return rep;
}

BlockEffectiveness block_effectiveness(const Eigen::Ref<const Eigen::VectorXd>& hedged,
                                       const Eigen::Ref<const Eigen::VectorXd>& unhedged,
                                       int block_len, double alpha) {
    if (hedged.size() != unhedged.size()) {
        throw Error(Errc::date_mismatch, "hedged/unhedged length mismatch");
    }
    if (block_len < 2) throw Error(Errc::invalid_params, "block_len must be >= 2");
    const Eigen::Index n_blocks = hedged.size() / block_len;
    if (n_blocks < 2) {
        throw Error(Errc::too_few_blocks, "need >= 2 full blocks of " +
                                              std::to_string(block_len) + ", have " +
                                              std::to_string(hedged.size()) + " observations");
    }

    std::vector<double> he_variance, he_var, he_cvar;
    he_variance.reserve(static_cast<std::size_t>(n_blocks));
    he_var.reserve(static_cast<std::size_t>(n_blocks));
    he_cvar.reserve(static_cast<std::size_t>(n_blocks));

    std::vector<double> losses_h(static_cast<std::size_t>(block_len));
    std::vector<double> losses_u(static_cast<std::size_t>(block_len));
    for (Eigen::Index b = 0; b < n_blocks; ++b) {
        const auto seg_h = hedged.segment(b * block_len, block_len);
        const auto seg_u = unhedged.segment(b * block_len, block_len);

        const double var_u = stats::variance(seg_u);
        if (var_u > 0.0) {
            he_variance.push_back(1.0 - stats::variance(seg_h) / var_u);
        }

        for (int i = 0; i < block_len; ++i) {
            losses_h[static_cast<std::size_t>(i)] = -seg_h[i];
            losses_u[static_cast<std::size_t>(i)] = -seg_u[i];
        }
        std::sort(losses_h.begin(), losses_h.end());
        std::sort(losses_u.begin(), losses_u.end());
        const TailPair tail_h = tail_measures(losses_h, alpha);
        const TailPair tail_u = tail_measures(losses_u, alpha);
        if (tail_u.var_q > 0.0) he_var.push_back(1.0 - tail_h.var_q / tail_u.var_q);
        if (tail_u.cvar > 0.0) he_cvar.push_back(1.0 - tail_h.cvar / tail_u.cvar);
    }

    auto to_vec = [](const std::vector<double>& v) {
        return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))
            .eval();
    };
    BlockEffectiveness out;
    out.block_len = block_len;
    out.variance = to_vec(he_variance);
    out.var_q = to_vec(he_var);
    out.cvar = to_vec(he_cvar);
    return out;
}

DiffTest bootstrap_diff_test(const Eigen::Ref<const Eigen::VectorXd>& he_a,
                             const Eigen::Ref<const Eigen::VectorXd>& he_b, int n_resamples,
                             std::uint64_t seed) {
    const Eigen::Index n = he_a.size();
    if (n != he_b.size()) {
        throw Error(Errc::date_mismatch, "paired series must have equal length");
    }
    if (n < 5) throw Error(Errc::too_few_blocks, "need >= 5 paired blocks");
    if (n_resamples < 2) throw Error(Errc::invalid_params, "need >= 2 resamples");

    const Eigen::VectorXd diff = he_a - he_b;
    const double observed = diff.mean();

    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < n_resamples; ++r) {
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(r));
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            acc += diff[static_cast<Eigen::Index>(rng.bounded(static_cast<std::uint64_t>(n)))];
        }
        const double m = acc / static_cast<double>(n);
        sum += m;
        sum_sq += m * m;
    }
    const double n_r = static_cast<double>(n_resamples);
    const double mean_r = sum / n_r;
    const double var_r = std::max(0.0, (sum_sq - n_r * mean_r * mean_r) / (n_r - 1.0));

    DiffTest test;
    test.n_resamples = n_resamples;
    test.bootstrap_se = std::sqrt(var_r);
    if (test.bootstrap_se > 0.0) {
        test.t_stat = observed / test.bootstrap_se;
    } else {
        test.t_stat = (observed == 0.0) ? 0.0
                                        : std::copysign(std::numeric_limits<double>::infinity(),
                                                        observed);
    }
    test.significant_5pct = std::abs(test.t_stat) > kNormal5pct;
    return test;
}

}  // namespace hedgescale::risk

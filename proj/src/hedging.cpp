#include "hedgescale/hedging.hpp"

#include <algorithm>
#include <cmath>

#include "hedgescale/errors.hpp"
#include "hedgescale/stats.hpp"

namespace hedgescale::hedge {

const char* hedge_kind_name(HedgeKind k) {
    switch (k) {
        case HedgeKind::ols: return "ols";
        case HedgeKind::garch: return "garch";
        case HedgeKind::scaled_from_base: return "scaled";
        case HedgeKind::naive: return "naive";
    }
    return "unknown";
}

HedgePath ols_hedge(const AlignedPair& pair) {
    pair.validate();
    if (pair.size() < 3) throw Error(Errc::too_short, "ols_hedge needs >= 3 observations");
    const double var_f = stats::variance(pair.futures.returns);
    if (!(var_f > 0.0)) {
        throw Error(Errc::degenerate_variance, "futures leg has zero variance");
    }
    const double ratio = stats::covariance(pair.cash.returns, pair.futures.returns) / var_f;

    HedgePath hp;
    hp.kind = HedgeKind::ols;
    hp.horizon_h = pair.frequency_h();
    hp.dates = pair.cash.dates;
    hp.ratios = Eigen::VectorXd::Constant(pair.size(), ratio);
    return hp;
}

HedgePath garch_hedge(const garch::CovariancePath& path, int horizon_h) {
    const Eigen::Index n = path.h_f.size();
    if (n < 1) throw Error(Errc::too_short, "empty covariance path");
    HedgePath hp;
    hp.kind = HedgeKind::garch;
    hp.horizon_h = horizon_h;
    hp.dates = path.dates;
    hp.ratios = path.h_sf.array() / path.h_f.array();
    if (!hp.ratios.allFinite()) {
        throw Error(Errc::invalid_params, "non-finite hedge ratio in path");
    }
    return hp;
}

HedgePath scaled_hedge(const HedgePath& base, const std::vector<Date>& target_dates,
                       int horizon_h) {
    if (base.kind != HedgeKind::ols && base.kind != HedgeKind::garch) {
        throw Error(Errc::invalid_params, "scaled_hedge needs an ols or garch base path");
    }
    if (base.horizon_h != 1) {
        throw Error(Errc::invalid_params, "scaled_hedge needs a base-frequency path");
    }
    if (horizon_h < 1) throw Error(Errc::invalid_params, "horizon_h must be >= 1");

    HedgePath hp;
    hp.kind = HedgeKind::scaled_from_base;
    hp.horizon_h = horizon_h;
    hp.dates = target_dates;
    hp.ratios.resize(static_cast<Eigen::Index>(target_dates.size()));

    for (std::size_t k = 0; k < target_dates.size(); ++k) {
        // Last base date at or before the block end, then step back to the
        // block's first base date.
        const auto it =
            std::upper_bound(base.dates.begin(), base.dates.end(), target_dates[k]);
        const std::ptrdiff_t end_idx = (it - base.dates.begin()) - 1;
        const std::ptrdiff_t start_idx = end_idx - (horizon_h - 1);
        if (start_idx < 0) {
            throw Error(Errc::no_preceding_base_date,
                        "no base date before the period ending " + target_dates[k].to_iso());
        }
        hp.ratios[static_cast<Eigen::Index>(k)] = base.ratios[start_idx];
    }
    return hp;
}

HedgePath naive_hedge(const std::vector<Date>& dates, int horizon_h) {
    HedgePath hp;
    hp.kind = HedgeKind::naive;
    hp.horizon_h = horizon_h;
    hp.dates = dates;
    hp.ratios = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dates.size()));
    return hp;
}

HedgedReturns hedged_portfolio(const AlignedPair& pair, const HedgePath& hp, HedgeTiming timing) {
    pair.validate();
    if (hp.dates != pair.cash.dates) {
        throw Error(Errc::date_mismatch, "hedge path dates do not match the pair");
    }
    HedgedReturns out;
    out.dates = pair.cash.dates;
    out.returns = pair.cash.returns - hp.ratios.cwiseProduct(pair.futures.returns);
    out.source = std::string(hedge_kind_name(hp.kind)) + "_h" + std::to_string(hp.horizon_h) +
                 (timing == HedgeTiming::in_sample ? "_in" : "_out");
    return out;
}

}  // namespace hedgescale::hedge

#pragma once

#include <string>
#include <vector>

#include "hedgescale/garch.hpp"
#include "hedgescale/series.hpp"

namespace hedgescale::hedge {

enum class HedgeKind { ols, garch, scaled_from_base, naive };

[[nodiscard]] const char* hedge_kind_name(HedgeKind k);

/// Dated hedge-ratio path. ratios[t] is the number of futures units sold per
/// cash unit over the period ending at dates[t].
struct HedgePath {
    std::vector<Date> dates;
    Eigen::VectorXd ratios;
    HedgeKind kind = HedgeKind::ols;
    int horizon_h = 1;
};

struct HedgedReturns {
    std::vector<Date> dates;
    Eigen::VectorXd returns;
    std::string source;
};

/// Constant minimum-variance ratio cov(r_s, r_f) / var(r_f), replicated
/// across the pair's dates. Throws DegenerateVariance when the futures leg
/// is constant.
[[nodiscard]] HedgePath ols_hedge(const AlignedPair& pair);

/// Time-varying ratio h_sf / h_f per date of the filtered path. The path's
/// values are formed from information through t-1, so the same ratios serve
/// as one-step-ahead hedges when the path was filtered over a holdout with
/// fixed parameters.
[[nodiscard]] HedgePath garch_hedge(const garch::CovariancePath& path, int horizon_h = 1);

/// Map a base-frequency path onto h-period target dates: the ratio applied
/// over the block ending at a target date is the base ratio observed at the
/// block's first base date (the last base date at or before the start of the
/// target period). Square-root-of-time scaling of variance and covariance
/// cancels in the ratio, so the values are a subsequence of the base values.
[[nodiscard]] HedgePath scaled_hedge(const HedgePath& base, const std::vector<Date>& target_dates,
                                     int horizon_h);

/// beta = 1 for every date.
[[nodiscard]] HedgePath naive_hedge(const std::vector<Date>& dates, int horizon_h = 1);

enum class HedgeTiming { in_sample, out_of_sample };

/// Hedged portfolio r_s[t] - beta_t r_f[t]. The timing tag records whether
/// the ratios were fitted on the same sample (in_sample) or formed as
/// one-step-ahead forecasts over a holdout (out_of_sample); the arithmetic
/// is identical because GARCH ratios are already conditioned on t-1.
[[nodiscard]] HedgedReturns hedged_portfolio(const AlignedPair& pair, const HedgePath& hp,
                                             HedgeTiming timing);

}  // namespace hedgescale::hedge

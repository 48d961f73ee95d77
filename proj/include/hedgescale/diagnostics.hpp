#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hedgescale/series.hpp"

namespace hedgescale::diag {

enum class Verdict { reject, fail_to_reject, not_applicable };

/// Sample moments with mean and SD expressed as percentages of the decimal
/// returns. Skewness/kurtosis are absent for degenerate (constant) input;
/// their p-values come from the asymptotic standard errors sqrt(6/T) and
/// sqrt(24/T).
struct MomentReport {
    double mean_pct = 0.0;
    double sd_pct = 0.0;
    std::optional<double> excess_skewness;
    std::optional<double> excess_kurtosis;
    std::optional<double> p_skew;
    std::optional<double> p_kurt;
};

struct TestResult {
    double statistic = 0.0;
    std::optional<double> p_value;
    std::vector<std::pair<std::string, double>> critical_values;
    Verdict verdict = Verdict::not_applicable;
};

[[nodiscard]] MomentReport moments(const ReturnSeries& r);

/// Jarque-Bera normality statistic T/6 (S^2 + K^2/4), chi-squared(2) p-value.
[[nodiscard]] TestResult jarque_bera(const ReturnSeries& r, double significance = 0.05);

/// Engle LM test for ARCH effects: demean, regress squared residuals on a
/// constant and `lags` own lags, statistic (T - lags) R^2, chi-squared(lags).
[[nodiscard]] TestResult engle_lm(const ReturnSeries& r, int lags, double significance = 0.05);

enum class KpssVariant { constant, trend };

/// KPSS stationarity statistic T^-2 sum S_t^2 / s^2(l) with a Bartlett-kernel
/// long-run variance. Bandwidth defaults to the Newey-West automatic choice.
/// The verdict compares against the 1% critical value (0.739 constant,
/// 0.216 trend), which is echoed in critical_values.
[[nodiscard]] TestResult kpss(const ReturnSeries& r, KpssVariant variant,
                              std::optional<int> bandwidth = std::nullopt);

/// Pearson correlation of the two legs. Throws DegenerateVariance if either
/// leg is constant.
[[nodiscard]] double correlation(const AlignedPair& pair);

}  // namespace hedgescale::diag

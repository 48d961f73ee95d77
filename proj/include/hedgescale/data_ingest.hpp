#pragma once

#include <string>

#include "hedgescale/series.hpp"

namespace hedgescale::data {

/// Load a `date,price` CSV (header row, ISO-8601 dates, '.' decimal separator).
/// Rows are sorted by date; unparseable rows raise ParseError with the row
/// number, non-positive prices NonPositivePrice, repeated dates DuplicateDate.
[[nodiscard]] PriceSeries load_prices(const std::string& path, std::string label = "",
                                      AssetRole role = AssetRole::cash);

/// One-period log returns r_t = ln p_t - ln p_{t-1}; the first date is dropped
/// and frequency_h is 1. Throws TooShort if fewer than two prices.
[[nodiscard]] ReturnSeries log_returns(const PriceSeries& p);

/// Sum non-overlapping blocks of h consecutive base returns into one h-period
/// return dated at the block's final date. Blocks are anchored at the LAST
/// observation and walk backward, so the most recent data always forms a
/// complete block; a leading partial block is discarded.
[[nodiscard]] ReturnSeries aggregate(const ReturnSeries& r, int h);

/// Intersect the two date grids, preserving order. Observations present on
/// only one leg are dropped, never interpolated.
[[nodiscard]] AlignedPair align(const ReturnSeries& cash, const ReturnSeries& futures);

/// Partition at split_date: estimation gets dates <= split_date, holdout the
/// rest. An empty holdout is allowed (split at the final date).
[[nodiscard]] SampleSplit split_sample(const AlignedPair& pair, Date split_date);

/// Write a PriceSeries in the load_prices CSV format at full precision.
void write_prices_csv(const PriceSeries& p, const std::string& path);

}  // namespace hedgescale::data

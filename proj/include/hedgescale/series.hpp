#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hedgescale/date.hpp"

namespace hedgescale {

enum class AssetRole { cash, futures };

/// Dated positive price levels for one leg of a hedge.
/// Invariants (checked by validate()): dates strictly increasing, all prices > 0.
struct PriceSeries {
    std::vector<Date> dates;
    Eigen::VectorXd prices;
    std::string label;
    AssetRole role = AssetRole::cash;

    void validate() const;
    [[nodiscard]] Eigen::Index size() const { return prices.size(); }
};

/// Log returns at a declared frequency: each observation spans frequency_h
/// base periods and is dated at its period end.
struct ReturnSeries {
    std::vector<Date> dates;
    Eigen::VectorXd returns;
    int frequency_h = 1;
    std::string label;

    void validate() const;
    [[nodiscard]] Eigen::Index size() const { return returns.size(); }
};

/// Cash and futures return series on identical date grids.
struct AlignedPair {
    ReturnSeries cash;
    ReturnSeries futures;

    void validate() const;
    [[nodiscard]] Eigen::Index size() const { return cash.returns.size(); }
    [[nodiscard]] int frequency_h() const { return cash.frequency_h; }
};

/// Estimation/holdout partition at split_date (estimation dates <= split_date).
struct SampleSplit {
    AlignedPair estimation;
    AlignedPair holdout;
    Date split_date;
};

}  // namespace hedgescale

#include "hedgescale/series.hpp"

#include "hedgescale/errors.hpp"

namespace hedgescale {

void PriceSeries::validate() const {
    if (static_cast<Eigen::Index>(dates.size()) != prices.size()) {
        throw Error(Errc::invalid_params, "price series has " + std::to_string(dates.size()) +
                                              " dates but " + std::to_string(prices.size()) +
                                              " prices");
    }
    for (Eigen::Index i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0)) {
            throw Error(Errc::non_positive_price,
                        label + " price at " + dates[static_cast<std::size_t>(i)].to_iso());
        }
        if (i > 0 && !(dates[static_cast<std::size_t>(i - 1)] < dates[static_cast<std::size_t>(i)])) {
            throw Error(Errc::duplicate_date,
                        label + " dates not strictly increasing at " +
                            dates[static_cast<std::size_t>(i)].to_iso());
        }
    }
}

void ReturnSeries::validate() const {
    if (static_cast<Eigen::Index>(dates.size()) != returns.size()) {
        throw Error(Errc::invalid_params, "return series length mismatch");
    }
    if (frequency_h < 1) {
        throw Error(Errc::invalid_params, "frequency_h must be >= 1");
    }
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i])) {
            throw Error(Errc::duplicate_date,
                        label + " dates not strictly increasing at " + dates[i].to_iso());
        }
    }
}

void AlignedPair::validate() const {
    cash.validate();
    futures.validate();
    if (cash.frequency_h != futures.frequency_h) {
        throw Error(Errc::date_mismatch, "legs have different frequencies");
    }
    if (cash.dates != futures.dates) {
        throw Error(Errc::date_mismatch, "legs have different date grids");
    }
}

}  // namespace hedgescale

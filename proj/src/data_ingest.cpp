#include "hedgescale/data_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "hedgescale/errors.hpp"

namespace hedgescale::data {

namespace {

std::string strip(std::string s) {
    const auto from = s.find_first_not_of(" \t\r\n");
    if (from == std::string::npos) return "";
    const auto to = s.find_last_not_of(" \t\r\n");
    return s.substr(from, to - from + 1);
}

}  // namespace

PriceSeries load_prices(const std::string& path, std::string label, AssetRole role) {
    std::ifstream in(path);
    if (!in) {
        throw Error(Errc::missing_file, path);
    }
    if (label.empty()) label = path;

    std::vector<std::pair<Date, double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw Error(Errc::parse_error, path + " row " + std::to_string(line_no) +
                                               ": expected 'date,price'");
        }
        std::string date_field = strip(line.substr(0, comma));
        std::string price_field = strip(line.substr(comma + 1));
        if (!header_seen) {
            header_seen = true;
            // Header row is required by the format; skip it whatever the labels.
            std::string lower = date_field;
            std::transform(lower.begin(), lower.end(), lower.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            if (lower.find("date") != std::string::npos) continue;
        }
        Date date;
        try {
            date = Date::from_iso(date_field);
        } catch (const Error&) {
            throw Error(Errc::parse_error,
                        path + " row " + std::to_string(line_no) + ": bad date '" + date_field + "'");
        }
        double price = 0.0;
        try {
            std::size_t used = 0;
            price = std::stod(price_field, &used);
            if (used != price_field.size()) throw std::invalid_argument(price_field);
        } catch (const std::exception&) {
            throw Error(Errc::parse_error, path + " row " + std::to_string(line_no) +
                                               ": bad price '" + price_field + "'");
        }
        if (!(price > 0.0)) {
            throw Error(Errc::non_positive_price,
                        path + " row " + std::to_string(line_no) + " (" + date.to_iso() + ")");
        }
        rows.emplace_back(date, price);
    }
    if (rows.empty()) {
        throw Error(Errc::parse_error, path + ": no data rows");
    }

    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i - 1].first == rows[i].first) {
            throw Error(Errc::duplicate_date, path + ": " + rows[i].first.to_iso());
        }
    }

    PriceSeries out;
    out.label = std::move(label);
    out.role = role;
    out.dates.reserve(rows.size());
    out.prices.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.dates.push_back(rows[i].first);
        out.prices[static_cast<Eigen::Index>(i)] = rows[i].second;
    }
    out.validate();
    return out;
}

ReturnSeries log_returns(const PriceSeries& p) {
    p.validate();
    const Eigen::Index n = p.size();
    if (n < 2) {
        throw Error(Errc::too_short, "need at least 2 prices, got " + std::to_string(n));
    }
    ReturnSeries out;
    out.label = p.label;
    out.frequency_h = 1;
    out.dates.assign(p.dates.begin() + 1, p.dates.end());
    out.returns = p.prices.tail(n - 1).array().log() - p.prices.head(n - 1).array().log();
    return out;
}

ReturnSeries aggregate(const ReturnSeries& r, int h) {
    r.validate();
    if (r.frequency_h != 1) {
        throw Error(Errc::invalid_params, "aggregate expects base-frequency input");
    }
    if (h < 1) {
        throw Error(Errc::invalid_params, "h must be >= 1");
    }
    if (h == 1) return r;
    const Eigen::Index n = r.size();
    if (n < h) {
        throw Error(Errc::too_short,
                    "need at least " + std::to_string(h) + " returns, got " + std::to_string(n));
    }
    const Eigen::Index blocks = n / h;
    const Eigen::Index lead = n - blocks * h;  // leading partial block dropped

    ReturnSeries out;
    out.label = r.label;
    out.frequency_h = h;
    out.dates.reserve(static_cast<std::size_t>(blocks));
    out.returns.resize(blocks);
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const Eigen::Index from = lead + b * h;
        out.returns[b] = r.returns.segment(from, h).sum();
        out.dates.push_back(r.dates[static_cast<std::size_t>(from + h - 1)]);
    }
    return out;
}

AlignedPair align(const ReturnSeries& cash, const ReturnSeries& futures) {
    cash.validate();
    futures.validate();
    if (cash.frequency_h != futures.frequency_h) {
        throw Error(Errc::date_mismatch, "cannot align series at different frequencies");
    }

    std::vector<Date> common;
    std::vector<Eigen::Index> idx_c, idx_f;
    std::size_t i = 0, j = 0;
    while (i < cash.dates.size() && j < futures.dates.size()) {
        if (cash.dates[i] == futures.dates[j]) {
            common.push_back(cash.dates[i]);
            idx_c.push_back(static_cast<Eigen::Index>(i));
            idx_f.push_back(static_cast<Eigen::Index>(j));
            ++i;
            ++j;
        } else if (cash.dates[i] < futures.dates[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    if (common.empty()) {
        throw Error(Errc::empty_intersection, "no common dates between legs");
    }

    auto take = [&](const ReturnSeries& src, const std::vector<Eigen::Index>& idx) {
        ReturnSeries out;
        out.label = src.label;
        out.frequency_h = src.frequency_h;
        out.dates = common;
        out.returns.resize(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) {
            out.returns[static_cast<Eigen::Index>(k)] = src.returns[idx[k]];
        }
        return out;
    };

    AlignedPair pair{take(cash, idx_c), take(futures, idx_f)};
    pair.validate();
    return pair;
}

SampleSplit split_sample(const AlignedPair& pair, Date split_date) {
    pair.validate();
    if (pair.size() == 0) {
        throw Error(Errc::too_short, "empty pair");
    }
    if (split_date < pair.cash.dates.front() || pair.cash.dates.back() < split_date) {
        throw Error(Errc::split_out_of_range,
                    split_date.to_iso() + " outside [" + pair.cash.dates.front().to_iso() + ", " +
                        pair.cash.dates.back().to_iso() + "]");
    }
    const auto it = std::upper_bound(pair.cash.dates.begin(), pair.cash.dates.end(), split_date);
    const Eigen::Index n_est = static_cast<Eigen::Index>(it - pair.cash.dates.begin());
    const Eigen::Index n_hold = pair.size() - n_est;

    auto slice = [&](const ReturnSeries& src, Eigen::Index from, Eigen::Index len) {
        ReturnSeries out;
        out.label = src.label;
        out.frequency_h = src.frequency_h;
        out.dates.assign(src.dates.begin() + from, src.dates.begin() + from + len);
        out.returns = src.returns.segment(from, len);
        return out;
    };

    SampleSplit split;
    split.split_date = split_date;
    split.estimation = AlignedPair{slice(pair.cash, 0, n_est), slice(pair.futures, 0, n_est)};
    split.holdout =
        AlignedPair{slice(pair.cash, n_est, n_hold), slice(pair.futures, n_est, n_hold)};
    return split;
}

void write_prices_csv(const PriceSeries& p, const std::string& path) {
    p.validate();
    std::ofstream out(path);
    if (!out) {
        throw Error(Errc::io_error, "cannot write " + path);
    }
    out << "date,price\n";
    char buf[40];
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", p.prices[i]);
        out << p.dates[static_cast<std::size_t>(i)].to_iso() << ',' << buf << '\n';
    }
    if (!out) {
        throw Error(Errc::io_error, "short write to " + path);
    }
}

}  // namespace hedgescale::data

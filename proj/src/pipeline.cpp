#include "hedgescale/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <sstream>
#include <tuple>

#include "hedgescale/data_ingest.hpp"
#include "hedgescale/diagnostics.hpp"
#include "hedgescale/effectiveness.hpp"
#include "hedgescale/errors.hpp"
#include "hedgescale/hedging.hpp"
#include "hedgescale/scaling.hpp"
#include "hedgescale/stats.hpp"

namespace hedgescale::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "hedgescale 0.1.0";

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fmt_full(double x) {
    if (std::isnan(x)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt(double x, int decimals) {
    if (std::isnan(x)) return "NA";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
    return buf;
}

/// Tracks files written by one run so a failure can remove partial output.
/// Writes go to a temp name first and are renamed into place.
class FileSink {
public:
    explicit FileSink(fs::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& content, const std::string& stage) {
        const fs::path target = dir_ / name;
        const fs::path tmp = dir_ / (name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) throw Error(Errc::io_error, "cannot write " + tmp.string());
            out << content;
            if (!out) throw Error(Errc::io_error, "short write to " + tmp.string());
        }
        fs::rename(tmp, target);
        const std::scoped_lock lock(mu_);
        records_.emplace_back(name, stage);
    }

    void remove_all() {
        const std::scoped_lock lock(mu_);
        for (const auto& [name, stage] : records_) {
            std::error_code ec;
            fs::remove(dir_ / name, ec);
        }
        records_.clear();
    }

    [[nodiscard]] std::vector<std::pair<std::string, std::string>> records() const {
        const std::scoped_lock lock(mu_);
        auto copy = records_;
        std::sort(copy.begin(), copy.end());
        return copy;
    }

private:
    fs::path dir_;
    mutable std::mutex mu_;
    std::vector<std::pair<std::string, std::string>> records_;
};

AlignedPair slice_pair(const AlignedPair& p, Eigen::Index from, Eigen::Index len) {
    auto slice = [&](const ReturnSeries& s) {
        ReturnSeries out;
        out.label = s.label;
        out.frequency_h = s.frequency_h;
        out.dates.assign(s.dates.begin() + from, s.dates.begin() + from + len);
        out.returns = s.returns.segment(from, len);
        return out;
    };
    return AlignedPair{slice(p.cash), slice(p.futures)};
}

hedge::HedgePath slice_garch_path(const garch::CovariancePath& path, Eigen::Index from,
                                  Eigen::Index len, int h) {
    hedge::HedgePath hp;
    hp.kind = hedge::HedgeKind::garch;
    hp.horizon_h = h;
    hp.dates.assign(path.dates.begin() + from, path.dates.begin() + from + len);
    hp.ratios = (path.h_sf.segment(from, len).array() / path.h_f.segment(from, len).array());
    return hp;
}

struct DiagBlock {
    diag::MomentReport mom;
    diag::TestResult jb;
    diag::TestResult lm;
    diag::TestResult kpss_c;
    diag::TestResult kpss_t;
};

struct StrategyEval {
    std::string model;    // ols | garch
    std::string variant;  // actual | scaled
    risk::RiskMeasures rm;
    risk::EffectivenessReport he;
    risk::BlockEffectiveness blocks;
};

struct WindowEval {
    bool present = false;
    risk::RiskMeasures unhedged;
    std::vector<StrategyEval> strategies;
};

struct HorizonData {
    int h = 1;
    AlignedPair full;
    Eigen::Index n_est = 0;  // leading observations in the estimation window
    garch::VechEstimationResult est;
    garch::CovariancePath path_full;
    std::optional<garch::VechGarchParams> scaled_params;

    DiagBlock diag_cash, diag_fut;
    double correlation = 0.0;

    hedge::HedgePath ols_in, garch_in;
    std::optional<hedge::HedgePath> scaled_ols_in, scaled_garch_in;
    hedge::HedgePath ols_out, garch_out;
    std::optional<hedge::HedgePath> scaled_ols_out, scaled_garch_out;

    WindowEval eval_in, eval_out;
    // (timing, model, measure, test) for actual-vs-scaled comparisons
    std::vector<std::tuple<std::string, std::string, std::string, risk::DiffTest>> diff_tests;
};

struct AssetData {
    std::string label;
    AlignedPair base;
    double kappa_cash = 3.0;
    double kappa_fut = 3.0;
    std::vector<HorizonData> horizons;
};

const char* measure_names[3] = {"variance", "var", "cvar"};

double measure_of(const risk::RiskMeasures& rm, int m) {
    return m == 0 ? rm.variance : (m == 1 ? rm.var_q : rm.cvar);
}

double he_of(const risk::EffectivenessReport& he, int m) {
    return m == 0 ? he.he_variance : (m == 1 ? he.he_var : he.he_cvar);
}

const Eigen::VectorXd& blocks_of(const risk::BlockEffectiveness& b, int m) {
    return m == 0 ? b.variance : (m == 1 ? b.var_q : b.cvar);
}

}  // namespace

void RunConfig::validate() const {
    if (assets.empty()) throw Error(Errc::invalid_config, "no assets configured");
    for (const auto& a : assets) {
        if (a.label.empty() || a.cash_path.empty() || a.futures_path.empty()) {
            throw Error(Errc::invalid_config, "asset entries need label, cash path, futures path");
        }
    }
    if (horizons.empty()) throw Error(Errc::invalid_config, "horizons must be non-empty");
    for (int h : horizons) {
        if (h < 1) throw Error(Errc::invalid_config, "horizons must be >= 1");
    }
    if (!(tail_alpha > 0.0) || !(tail_alpha < 0.5)) {
        throw Error(Errc::invalid_config, "tail_alpha must be in (0, 0.5)");
    }
    if (n_resamples < 2) throw Error(Errc::invalid_config, "n_resamples must be >= 2");
    if (!seed) throw Error(Errc::invalid_config, "seed is mandatory (reproducibility)");
    if (output_dir.empty()) throw Error(Errc::invalid_config, "output_dir must be set");
    if (lm_lags < 1) throw Error(Errc::invalid_config, "lm_lags must be >= 1");
}

int RunConfig::block_length(int h, Eigen::Index estimation_size) const {
    const auto it = block_lengths.find(h);
    if (it != block_lengths.end()) return it->second;
    if (h == 1) return 50;
    if (h == 5) return 20;
    if (h == 20) return 10;
    // Keep roughly >= 10 blocks in the window.
    const auto tenth = static_cast<int>(estimation_size / 10);
    return std::max(5, std::min(50, tenth));
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::missing_file, path);

    RunConfig cfg;
    cfg.horizons.clear();
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        const auto from = s.find_first_not_of(" \t\r");
        if (from == std::string::npos) return std::string();
        const auto to = s.find_last_not_of(" \t\r");
        return s.substr(from, to - from + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(Errc::invalid_config,
                        path + " line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "asset") {
                std::stringstream ss(value);
                std::string field;
                std::vector<std::string> fields;
                while (std::getline(ss, field, ',')) fields.push_back(trim(field));
                if (fields.size() != 3) {
                    throw Error(Errc::invalid_config, "asset needs 'label, cash.csv, futures.csv'");
                }
                cfg.assets.push_back({fields[0], fields[1], fields[2]});
            } else if (key == "horizons") {
                std::stringstream ss(value);
                std::string field;
                while (std::getline(ss, field, ',')) cfg.horizons.push_back(std::stoi(trim(field)));
            } else if (key == "split_date") {
                cfg.split_date = Date::from_iso(value);
            } else if (key == "tail_alpha") {
                cfg.tail_alpha = std::stod(value);
            } else if (key == "n_resamples") {
                cfg.n_resamples = std::stoi(value);
            } else if (key == "seed") {
                cfg.seed = std::stoull(value);
            } else if (key.rfind("block_len.", 0) == 0) {
                cfg.block_lengths[std::stoi(key.substr(10))] = std::stoi(value);
            } else if (key == "kappa") {
                if (value != "sample") cfg.kappa_override = std::stod(value);
            } else if (key == "output_dir") {
                cfg.output_dir = value;
            } else if (key == "lm_lags") {
                cfg.lm_lags = std::stoi(value);
            } else if (key == "min_observations") {
                cfg.min_observations = std::stoi(value);
            } else if (key == "rolling") {
                cfg.rolling_reestimation = (value == "true" || value == "1");
            } else {
                throw Error(Errc::invalid_config, "unknown key '" + key + "'");
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(Errc::invalid_config,
                        path + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (cfg.horizons.empty()) cfg.horizons = {1, 5, 20};
    return cfg;
}

const char* version_string() { return kVersion; }

namespace {

std::string canonical_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "version=" << kVersion << '\n';
    for (const auto& a : cfg.assets) {
        out << "asset=" << a.label << ',' << a.cash_path << ',' << a.futures_path << '\n';
    }
    out << "horizons=";
    for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
        out << (i ? "," : "") << cfg.horizons[i];
    }
    out << "\nsplit_date=" << cfg.split_date.to_iso() << "\ntail_alpha=" << fmt_full(cfg.tail_alpha)
        << "\nn_resamples=" << cfg.n_resamples << "\nseed=" << *cfg.seed;
    for (const auto& [h, len] : cfg.block_lengths) out << "\nblock_len." << h << '=' << len;
    out << "\nkappa=" << (cfg.kappa_override ? fmt_full(*cfg.kappa_override) : "sample");
    out << "\nlm_lags=" << cfg.lm_lags << "\nmin_observations=" << cfg.min_observations
        << "\nrolling=" << (cfg.rolling_reestimation ? 1 : 0) << '\n';
    return out.str();
}

DiagBlock run_diag_block(const ReturnSeries& r, int lm_lags) {
    DiagBlock d;
    d.mom = diag::moments(r);
    d.jb = diag::jarque_bera(r);
    d.lm = diag::engle_lm(r, lm_lags);
    d.kpss_c = diag::kpss(r, diag::KpssVariant::constant);
    d.kpss_t = diag::kpss(r, diag::KpssVariant::trend);
    return d;
}

WindowEval evaluate_window(const AlignedPair& window,
                           const std::vector<const hedge::HedgePath*>& paths,
                           const std::vector<std::pair<std::string, std::string>>& tags,
                           hedge::HedgeTiming timing, double alpha, int block_len) {
    WindowEval ev;
    if (window.size() < 2) return ev;
    ev.present = true;
    ev.unhedged = risk::risk_measures(window.cash.returns, alpha, /*clamp_tail=*/true);
    for (std::size_t i = 0; i < paths.size(); ++i) {
        StrategyEval se;
        se.model = tags[i].first;
        se.variant = tags[i].second;
        const hedge::HedgedReturns hr = hedge::hedged_portfolio(window, *paths[i], timing);
        se.rm = risk::risk_measures(hr.returns, alpha, /*clamp_tail=*/true);
        se.he = risk::effectiveness(se.rm, ev.unhedged);
        se.blocks = risk::block_effectiveness(hr.returns, window.cash.returns, block_len, alpha);
        ev.strategies.push_back(std::move(se));
    }
    return ev;
}

const StrategyEval* find_strategy(const WindowEval& ev, const std::string& model,
                                  const std::string& variant) {
    for (const auto& s : ev.strategies) {
        if (s.model == model && s.variant == variant) return &s;
    }
    return nullptr;
}

AssetData compute_asset(const AssetConfig& asset, const RunConfig& cfg,
                        const StageSelection& stages) {
    AssetData data;
    data.label = asset.label;

    std::string stage = "ingest";
    int stage_h = 0;
    try {
        const PriceSeries cash_prices =
            data::load_prices(asset.cash_path, asset.label + "_cash", AssetRole::cash);
        const PriceSeries fut_prices =
            data::load_prices(asset.futures_path, asset.label + "_futures", AssetRole::futures);
        data.base = data::align(data::log_returns(cash_prices), data::log_returns(fut_prices));

        const bool need_estimate =
            stages.estimate || stages.scale || stages.hedge || stages.evaluate;

        // Horizon 1 first: scaled parameters and scaled hedges derive from it.
        std::vector<int> horizons = cfg.horizons;
        std::sort(horizons.begin(), horizons.end());
        horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
        const bool has_base_horizon = !horizons.empty() && horizons.front() == 1;
        data.horizons.reserve(horizons.size());

        for (int h : horizons) {
            stage = "ingest";
            stage_h = h;
            HorizonData hd;
            hd.h = h;
            if (h == 1) {
                hd.full = data.base;
            } else {
                hd.full = AlignedPair{data::aggregate(data.base.cash, h),
                                      data::aggregate(data.base.futures, h)};
                hd.full.validate();
            }
            const SampleSplit split = data::split_sample(hd.full, cfg.split_date);
            hd.n_est = split.estimation.size();
            if (split.holdout.size() == 0) {
                std::cerr << "warning: empty holdout at horizon " << h << " for " << asset.label
                          << "\n";
            }

            if (stages.diagnostics) {
                stage = "diagnose";
                hd.diag_cash = run_diag_block(split.estimation.cash, cfg.lm_lags);
                hd.diag_fut = run_diag_block(split.estimation.futures, cfg.lm_lags);
                hd.correlation = diag::correlation(split.estimation);
            }

            const HorizonData* base_hd = data.horizons.empty() ? nullptr : &data.horizons.front();
            if (base_hd && base_hd->h != 1) base_hd = nullptr;

            if (need_estimate) {
                stage = "estimate";
                garch::EstimateOptions eopts;
                eopts.min_observations = cfg.min_observations;
                hd.est = garch::estimate_vech(split.estimation, std::nullopt, eopts);
                if (!hd.est.converged) {
                    std::cerr << "warning: estimation flagged non-convergence at horizon " << h
                              << " for " << asset.label << "\n";
                }

                // Filter the full pair with estimation-window parameters and
                // seed: the leading range reproduces the in-sample path and
                // the holdout range is the sequence of one-step-ahead
                // forecasts under fixed parameters.
                const Eigen::VectorXd eps_s =
                    split.estimation.cash.returns.array() - hd.est.params.mu_s;
                const Eigen::VectorXd eps_f =
                    split.estimation.futures.returns.array() - hd.est.params.mu_f;
                const double t_est = static_cast<double>(split.estimation.size());
                const garch::VechSeed seed{eps_s.squaredNorm() / t_est,
                                           eps_f.squaredNorm() / t_est,
                                           eps_s.dot(eps_f) / t_est};
                hd.path_full = garch::filter_vech(hd.full, hd.est.params, seed);

                if (h == 1) {
                    if (cfg.kappa_override) {
                        data.kappa_cash = data.kappa_fut = *cfg.kappa_override;
                    } else {
                        data.kappa_cash = stats::excess_kurtosis(eps_s) + 3.0;
                        data.kappa_fut = stats::excess_kurtosis(eps_f) + 3.0;
                    }
                }
            }

            if (h > 1 && stages.scale && need_estimate) {
                stage = "scale";
                if (!has_base_horizon || !base_hd) {
                    throw Error(Errc::invalid_config,
                                "scaling requires horizon 1 in the horizons list");
                }
                hd.scaled_params = scaling::dn_aggregate_vech(
                    base_hd->est.params, {data.kappa_cash, data.kappa_fut}, h);
            }

            if (stages.hedge || stages.evaluate) {
                stage = "hedge";
                const Eigen::Index n_est = hd.n_est;
                const Eigen::Index n_hold = hd.full.size() - n_est;
                const AlignedPair est_pair = slice_pair(hd.full, 0, n_est);

                hd.ols_in = hedge::ols_hedge(est_pair);
                hd.ols_in.horizon_h = h;
                hd.garch_in = slice_garch_path(hd.path_full, 0, n_est, h);

                if (n_hold > 0) {
                    const AlignedPair hold_pair = slice_pair(hd.full, n_est, n_hold);
                    hd.ols_out = hedge::HedgePath{
                        hold_pair.cash.dates,
                        Eigen::VectorXd::Constant(n_hold, hd.ols_in.ratios[0]),
                        hedge::HedgeKind::ols, h};
                    if (cfg.rolling_reestimation) {
                        // Expanding-window refit at each holdout step, warm
                        // started from the previous fit; the ratio applied at
                        // step t uses only data through t-1.
                        garch::EstimateOptions ropts;
                        ropts.min_observations = cfg.min_observations;
                        ropts.multistarts = 1;
                        ropts.compute_standard_errors = false;
                        garch::VechGarchParams warm = hd.est.params;
                        Eigen::VectorXd ratios(n_hold);
                        for (Eigen::Index k = 0; k < n_hold; ++k) {
                            const AlignedPair window = slice_pair(hd.full, 0, n_est + k);
                            const auto refit = garch::estimate_vech(window, warm, ropts);
                            warm = refit.params;
                            const auto path = garch::filter_vech(window, warm);
                            const auto fc = garch::forecast_one_step(path, warm);
                            ratios[k] = fc.h_sf / fc.h_f;
                        }
                        hd.garch_out = hedge::HedgePath{hold_pair.cash.dates, std::move(ratios),
                                                        hedge::HedgeKind::garch, h};
                    } else {
                        hd.garch_out = slice_garch_path(hd.path_full, n_est, n_hold, h);
                    }
                }

                if (h > 1 && has_base_horizon && base_hd) {
                    // Scaled hedges subsample the base-frequency ratio at each
                    // target block's first base date; square-root-of-time
                    // scaling of variance and covariance cancels in the ratio.
                    hedge::HedgePath base_garch_all =
                        slice_garch_path(base_hd->path_full, 0, base_hd->full.size(), 1);
                    hedge::HedgePath base_ols_all;
                    base_ols_all.kind = hedge::HedgeKind::ols;
                    base_ols_all.horizon_h = 1;
                    base_ols_all.dates = base_hd->full.cash.dates;
                    base_ols_all.ratios = Eigen::VectorXd::Constant(base_hd->full.size(),
                                                                    base_hd->ols_in.ratios[0]);

                    hd.scaled_ols_in = hedge::scaled_hedge(base_ols_all, est_pair.cash.dates, h);
                    hd.scaled_garch_in =
                        hedge::scaled_hedge(base_garch_all, est_pair.cash.dates, h);
                    if (n_hold > 0) {
                        const AlignedPair hold_pair = slice_pair(hd.full, n_est, n_hold);
                        hd.scaled_ols_out =
                            hedge::scaled_hedge(base_ols_all, hold_pair.cash.dates, h);
                        hd.scaled_garch_out =
                            hedge::scaled_hedge(base_garch_all, hold_pair.cash.dates, h);
                    }
                }
            }

            if (stages.evaluate) {
                stage = "evaluate";
                const Eigen::Index n_est = hd.n_est;
                const Eigen::Index n_hold = hd.full.size() - n_est;
                const AlignedPair est_pair = slice_pair(hd.full, 0, n_est);

                std::vector<const hedge::HedgePath*> paths{&hd.ols_in, &hd.garch_in};
                std::vector<std::pair<std::string, std::string>> tags{{"ols", "actual"},
                                                                      {"garch", "actual"}};
                if (hd.scaled_ols_in) {
                    paths.push_back(&*hd.scaled_ols_in);
                    tags.emplace_back("ols", "scaled");
                }
                if (hd.scaled_garch_in) {
                    paths.push_back(&*hd.scaled_garch_in);
                    tags.emplace_back("garch", "scaled");
                }
                hd.eval_in = evaluate_window(est_pair, paths, tags, hedge::HedgeTiming::in_sample,
                                             cfg.tail_alpha, cfg.block_length(h, n_est));

                if (n_hold >= 2) {
                    const AlignedPair hold_pair = slice_pair(hd.full, n_est, n_hold);
                    std::vector<const hedge::HedgePath*> opaths{&hd.ols_out, &hd.garch_out};
                    std::vector<std::pair<std::string, std::string>> otags{{"ols", "actual"},
                                                                           {"garch", "actual"}};
                    if (hd.scaled_ols_out) {
                        opaths.push_back(&*hd.scaled_ols_out);
                        otags.emplace_back("ols", "scaled");
                    }
                    if (hd.scaled_garch_out) {
                        opaths.push_back(&*hd.scaled_garch_out);
                        otags.emplace_back("garch", "scaled");
                    }
                    try {
                        hd.eval_out = evaluate_window(hold_pair, opaths, otags,
                                                      hedge::HedgeTiming::out_of_sample,
                                                      cfg.tail_alpha,
                                                      cfg.block_length(h, n_hold));
                    } catch (const Error& e) {
                        if (e.code() != Errc::too_few_blocks) throw;
                        std::cerr << "warning: holdout too short for block effectiveness at "
                                     "horizon "
                                  << h << " for " << asset.label << "\n";
                    }
                }

                // Actual-vs-scaled difference tests, paired per block.
                for (const auto& [timing, ev] :
                     {std::pair{std::string("in"), &hd.eval_in},
                      std::pair{std::string("out"), &hd.eval_out}}) {
                    if (!ev->present || h == 1) continue;
                    for (const std::string model : {"ols", "garch"}) {
                        const StrategyEval* actual = find_strategy(*ev, model, "actual");
                        const StrategyEval* scaled = find_strategy(*ev, model, "scaled");
                        if (!actual || !scaled) continue;
                        for (int m = 0; m < 3; ++m) {
                            const Eigen::VectorXd& a = blocks_of(actual->blocks, m);
                            const Eigen::VectorXd& b = blocks_of(scaled->blocks, m);
                            if (a.size() != b.size() || a.size() < 5) continue;
                            const std::uint64_t cell_seed =
                                *cfg.seed ^
                                fnv1a(asset.label + "|" + timing + "|" + std::to_string(h) + "|" +
                                      model + "|" + measure_names[m]);
                            hd.diff_tests.emplace_back(
                                timing, model, measure_names[m],
                                risk::bootstrap_diff_test(a, b, cfg.n_resamples, cell_seed));
                        }
                    }
                }
            }

            data.horizons.push_back(std::move(hd));
        }
    } catch (const Error& e) {
        throw Error(e.code(), "stage=" + stage + " asset=" + asset.label +
                                  " horizon=" + std::to_string(stage_h) + ": " + e.what());
    }
    return data;
}

// ---------------------------------------------------------------------------
// Artifact rendering
// ---------------------------------------------------------------------------

void append_diag_csv(std::ostringstream& csv, const std::string& asset, int h,
                     const std::string& leg, const DiagBlock& d, double sd_scaled_pct) {
    auto row = [&](const std::string& stat, double value,
                   std::optional<double> p = std::nullopt) {
        csv << asset << ',' << h << ',' << leg << ',' << stat << ',' << fmt_full(value) << ','
            << (p ? fmt_full(*p) : "") << '\n';
    };
    row("mean_pct", d.mom.mean_pct);
    row("sd_pct", d.mom.sd_pct);
    if (!std::isnan(sd_scaled_pct)) row("sd_scaled_pct", sd_scaled_pct);
    row("skewness", d.mom.excess_skewness.value_or(std::nan("")), d.mom.p_skew);
    row("excess_kurtosis", d.mom.excess_kurtosis.value_or(std::nan("")), d.mom.p_kurt);
    row("jarque_bera", d.jb.statistic, d.jb.p_value);
    row("engle_lm", d.lm.statistic, d.lm.p_value);
    row("kpss_constant", d.kpss_c.statistic);
    row("kpss_trend", d.kpss_t.statistic);
}

std::string render_diagnostics_csv(const AssetData& a, const std::vector<double>& sd1_pct) {
    std::ostringstream csv;
    csv << "asset,horizon,leg,stat,value,p_value\n";
    for (const auto& hd : a.horizons) {
        const double scaled_c =
            hd.h > 1 ? sd1_pct[0] * std::sqrt(static_cast<double>(hd.h)) : std::nan("");
        const double scaled_f =
            hd.h > 1 ? sd1_pct[1] * std::sqrt(static_cast<double>(hd.h)) : std::nan("");
        append_diag_csv(csv, a.label, hd.h, "cash", hd.diag_cash, scaled_c);
        append_diag_csv(csv, a.label, hd.h, "futures", hd.diag_fut, scaled_f);
        csv << a.label << ',' << hd.h << ",pair,correlation," << fmt_full(hd.correlation)
            << ",\n";
    }
    return csv.str();
}

void append_diag_txt(std::ostringstream& txt, const DiagBlock& c, const DiagBlock& f, double corr,
                     double sd_scaled_c, double sd_scaled_f) {
    auto line3 = [&](const std::string& name, const std::string& vc, const std::string& vf) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "  %-18s %16s %16s\n", name.c_str(), vc.c_str(),
                      vf.c_str());
        txt << buf;
    };
    auto stat_p = [](double stat, std::optional<double> p, int dec) {
        std::string s = fmt(stat, dec);
        if (p) s += " (" + fmt(*p, 2) + ")";
        return s;
    };
    line3("", "Cash", "Futures");
    line3("Mean", fmt(c.mom.mean_pct, 3), fmt(f.mom.mean_pct, 3));
    line3("SD", fmt(c.mom.sd_pct, 2), fmt(f.mom.sd_pct, 2));
    if (!std::isnan(sd_scaled_c)) {
        line3("SD Scaled", fmt(sd_scaled_c, 2), fmt(sd_scaled_f, 2));
    }
    line3("Skewness", stat_p(c.mom.excess_skewness.value_or(std::nan("")), c.mom.p_skew, 3),
          stat_p(f.mom.excess_skewness.value_or(std::nan("")), f.mom.p_skew, 3));
    line3("Kurtosis", stat_p(c.mom.excess_kurtosis.value_or(std::nan("")), c.mom.p_kurt, 2),
          stat_p(f.mom.excess_kurtosis.value_or(std::nan("")), f.mom.p_kurt, 2));
    line3("J-B", stat_p(c.jb.statistic, c.jb.p_value, 2),
          stat_p(f.jb.statistic, f.jb.p_value, 2));
    line3("LM", stat_p(c.lm.statistic, c.lm.p_value, 2),
          stat_p(f.lm.statistic, f.lm.p_value, 2));
    line3("KPSS - Constant", fmt(c.kpss_c.statistic, 3), fmt(f.kpss_c.statistic, 3));
    line3("     - Trend", fmt(c.kpss_t.statistic, 3), fmt(f.kpss_t.statistic, 3));
    line3("Correlation", fmt(corr, 3), "");
}

std::string render_diagnostics_txt(const AssetData& a, const std::vector<double>& sd1_pct) {
    std::ostringstream txt;
    txt << "Descriptive statistics: " << a.label << " (estimation sample)\n"
        << "Mean and SD are percentages; p-values in brackets.\n"
        << "KPSS 1% critical values: 0.739 (constant), 0.216 (trend).\n";
    for (const auto& hd : a.horizons) {
        txt << "\n" << hd.h << "-period frequency\n";
        const double sc =
            hd.h > 1 ? sd1_pct[0] * std::sqrt(static_cast<double>(hd.h)) : std::nan("");
        const double sf =
            hd.h > 1 ? sd1_pct[1] * std::sqrt(static_cast<double>(hd.h)) : std::nan("");
        append_diag_txt(txt, hd.diag_cash, hd.diag_fut, hd.correlation, sc, sf);
    }
    return txt.str();
}

std::string render_params_csv(const AssetData& a, bool with_scaled) {
    std::ostringstream csv;
    csv << "asset,horizon,param,estimate,plain_se,robust_se,scaled_estimate\n";
    for (const auto& hd : a.horizons) {
        const Eigen::VectorXd est = garch::to_flat(hd.est.params);
        const std::optional<Eigen::VectorXd> scaled =
            (with_scaled && hd.scaled_params)
                ? std::optional<Eigen::VectorXd>(garch::to_flat(*hd.scaled_params))
                : std::nullopt;
        const auto& names = garch::vech_param_names();
        for (int i = 0; i < garch::kVechParamCount; ++i) {
            csv << a.label << ',' << hd.h << ',' << names[static_cast<std::size_t>(i)] << ','
                << fmt_full(est[i]) << ',' << fmt_full(hd.est.plain_se[i]) << ','
                << fmt_full(hd.est.robust_se[i]) << ',' << (scaled ? fmt_full((*scaled)[i]) : "")
                << '\n';
        }
        auto persist_row = [&](const std::string& name, double direct, std::optional<double> sc) {
            csv << a.label << ',' << hd.h << ',' << name << ',' << fmt_full(direct) << ",,,"
                << (sc ? fmt_full(*sc) : "") << '\n';
        };
        persist_row("persistence_s", hd.est.params.s.persistence(),
                    scaled ? std::optional(hd.scaled_params->s.persistence()) : std::nullopt);
        persist_row("persistence_f", hd.est.params.f.persistence(),
                    scaled ? std::optional(hd.scaled_params->f.persistence()) : std::nullopt);
        csv << a.label << ',' << hd.h << ",loglik," << fmt_full(hd.est.loglik) << ",,,\n";
        csv << a.label << ',' << hd.h << ",converged," << (hd.est.converged ? 1 : 0) << ",,,\n";
    }
    csv << a.label << ",1,kappa_cash," << fmt_full(a.kappa_cash) << ",,,\n";
    csv << a.label << ",1,kappa_futures," << fmt_full(a.kappa_fut) << ",,,\n";
    return csv.str();
}

std::string render_params_txt(const AssetData& a, bool with_scaled) {
    std::ostringstream txt;
    txt << "Diagonal vech GARCH(1,1) estimates: " << a.label << "\n"
        << "Robust standard errors in parentheses.";
    if (with_scaled) {
        txt << " Scaled columns aggregate the 1-period\nestimates (kappa_cash = "
            << fmt(a.kappa_cash, 2) << ", kappa_futures = " << fmt(a.kappa_fut, 2)
            << ", covariance kappa = mean of the legs).";
    }
    txt << "\n\n";
    char buf[200];
    std::snprintf(buf, sizeof(buf), "%-12s", "");
    txt << buf;
    for (const auto& hd : a.horizons) {
        const std::string head = std::to_string(hd.h) + "-ACTUAL";
        std::snprintf(buf, sizeof(buf), " %16s", head.c_str());
        txt << buf;
    }
    if (with_scaled) {
        for (const auto& hd : a.horizons) {
            if (hd.scaled_params) {
                const std::string head = std::to_string(hd.h) + "-SCALED";
                std::snprintf(buf, sizeof(buf), " %16s", head.c_str());
                txt << buf;
            }
        }
    }
    txt << '\n';
    const auto& names = garch::vech_param_names();
    for (int i = 0; i < garch::kVechParamCount; ++i) {
        std::snprintf(buf, sizeof(buf), "%-12s", names[static_cast<std::size_t>(i)].c_str());
        txt << buf;
        for (const auto& hd : a.horizons) {
            const Eigen::VectorXd est = garch::to_flat(hd.est.params);
            const std::string cell = fmt(est[i], 4) + " (" + fmt(hd.est.robust_se[i], 3) + ")";
            std::snprintf(buf, sizeof(buf), " %16s", cell.c_str());
            txt << buf;
        }
        if (with_scaled) {
            for (const auto& hd : a.horizons) {
                if (hd.scaled_params) {
                    const Eigen::VectorXd sc = garch::to_flat(*hd.scaled_params);
                    std::snprintf(buf, sizeof(buf), " %16s", fmt(sc[i], 4).c_str());
                    txt << buf;
                }
            }
        }
        txt << '\n';
    }
    txt << "\nVolatility persistence (alpha + beta)\n";
    for (const std::string eq : {"s", "f"}) {
        std::snprintf(buf, sizeof(buf), "%-12s", ("persist_" + eq).c_str());
        txt << buf;
        for (const auto& hd : a.horizons) {
            const double v =
                eq == "s" ? hd.est.params.s.persistence() : hd.est.params.f.persistence();
            std::snprintf(buf, sizeof(buf), " %16s", fmt(v, 4).c_str());
            txt << buf;
        }
        if (with_scaled) {
            for (const auto& hd : a.horizons) {
                if (hd.scaled_params) {
                    const double v = eq == "s" ? hd.scaled_params->s.persistence()
                                               : hd.scaled_params->f.persistence();
                    std::snprintf(buf, sizeof(buf), " %16s", fmt(v, 4).c_str());
                    txt << buf;
                }
            }
        }
        txt << '\n';
    }
    return txt.str();
}

void append_path_stats(std::ostringstream& csv, const std::string& asset, int h,
                       const std::string& variant, const std::string& kind,
                       const Eigen::VectorXd& ratios) {
    const double m = ratios.mean();
    const double sd = ratios.size() > 1 ? std::sqrt((ratios.array() - m).square().sum() /
                                                    static_cast<double>(ratios.size() - 1))
                                        : 0.0;
    auto row = [&](const char* stat, double v) {
        csv << asset << ',' << h << ',' << variant << ',' << kind << ',' << stat << ','
            << fmt_full(v) << '\n';
    };
    row("mean", m);
    row("sd", sd);
    row("min", ratios.minCoeff());
    row("max", ratios.maxCoeff());
}

std::string render_ohr_stats_csv(const AssetData& a) {
    std::ostringstream csv;
    csv << "asset,horizon,variant,kind,stat,value\n";
    for (const auto& hd : a.horizons) {
        append_path_stats(csv, a.label, hd.h, "actual", "garch", hd.garch_in.ratios);
        if (hd.scaled_garch_in) {
            append_path_stats(csv, a.label, hd.h, "scaled", "garch", hd.scaled_garch_in->ratios);
        }
        csv << a.label << ',' << hd.h << ",actual,ols,ratio," << fmt_full(hd.ols_in.ratios[0])
            << '\n';
        if (hd.scaled_ols_in) {
            csv << a.label << ',' << hd.h << ",scaled,ols,ratio,"
                << fmt_full(hd.scaled_ols_in->ratios[0]) << '\n';
        }
    }
    return csv.str();
}

std::string render_ohr_stats_txt(const AssetData& a) {
    std::ostringstream txt;
    txt << "Optimal hedge ratios (estimation sample): " << a.label << "\n\n";
    char buf[200];
    auto stat_of = [](const Eigen::VectorXd& r, int which) {
        const double m = r.mean();
        switch (which) {
            case 0: return m;
            case 1:
                return r.size() > 1 ? std::sqrt((r.array() - m).square().sum() /
                                                static_cast<double>(r.size() - 1))
                                    : 0.0;
            case 2: return r.minCoeff();
            default: return r.maxCoeff();
        }
    };
    std::snprintf(buf, sizeof(buf), "%-9s", "");
    txt << buf;
    for (const auto& hd : a.horizons) {
        const std::string head = std::to_string(hd.h) + "d-ACT";
        std::snprintf(buf, sizeof(buf), " %10s", head.c_str());
        txt << buf;
    }
    for (const auto& hd : a.horizons) {
        if (hd.scaled_garch_in) {
            const std::string head = std::to_string(hd.h) + "d-SCL";
            std::snprintf(buf, sizeof(buf), " %10s", head.c_str());
            txt << buf;
        }
    }
    txt << "\nGARCH hedges\n";
    const char* stat_names[4] = {"Mean", "SD", "Minimum", "Maximum"};
    for (int s = 0; s < 4; ++s) {
        std::snprintf(buf, sizeof(buf), "%-9s", stat_names[s]);
        txt << buf;
        for (const auto& hd : a.horizons) {
            std::snprintf(buf, sizeof(buf), " %10s",
                          fmt(stat_of(hd.garch_in.ratios, s), 3).c_str());
            txt << buf;
        }
        for (const auto& hd : a.horizons) {
            if (hd.scaled_garch_in) {
                std::snprintf(buf, sizeof(buf), " %10s",
                              fmt(stat_of(hd.scaled_garch_in->ratios, s), 3).c_str());
                txt << buf;
            }
        }
        txt << '\n';
    }
    txt << "OLS hedges\n";
    std::snprintf(buf, sizeof(buf), "%-9s", "Ratio");
    txt << buf;
    for (const auto& hd : a.horizons) {
        std::snprintf(buf, sizeof(buf), " %10s", fmt(hd.ols_in.ratios[0], 3).c_str());
        txt << buf;
    }
    for (const auto& hd : a.horizons) {
        if (hd.scaled_ols_in) {
            std::snprintf(buf, sizeof(buf), " %10s", fmt(hd.scaled_ols_in->ratios[0], 3).c_str());
            txt << buf;
        }
    }
    txt << '\n';
    return txt.str();
}

std::string render_effectiveness_csv(const AssetData& a) {
    std::ostringstream csv;
    csv << "asset,timing,horizon,variant,model,measure,risk,reduction\n";
    for (const auto& hd : a.horizons) {
        for (const auto& [timing, ev] :
             {std::pair{"in", &hd.eval_in}, std::pair{"out", &hd.eval_out}}) {
            if (!ev->present) continue;
            for (int m = 0; m < 3; ++m) {
                csv << a.label << ',' << timing << ',' << hd.h << ",unhedged,,"
                    << measure_names[m] << ',' << fmt_full(measure_of(ev->unhedged, m)) << ",\n";
            }
            for (const auto& s : ev->strategies) {
                for (int m = 0; m < 3; ++m) {
                    csv << a.label << ',' << timing << ',' << hd.h << ',' << s.variant << ','
                        << s.model << ',' << measure_names[m] << ','
                        << fmt_full(measure_of(s.rm, m)) << ',' << fmt_full(he_of(s.he, m))
                        << '\n';
                }
            }
        }
    }
    return csv.str();
}

std::string render_effectiveness_txt(const AssetData& a) {
    std::ostringstream txt;
    txt << "Hedging performance: " << a.label << "\n"
        << "Cells are risk (percentage reduction vs unhedged in brackets);\n"
        << "variance in 1e-4 units, VaR and CVaR in 1e-2 units.\n";
    char buf[240];
    const char* measure_labels[3] = {"VARIANCE (x1e-4)", "VaR (x1e-2)", "CVaR (x1e-2)"};
    const double measure_scale[3] = {1e4, 1e2, 1e2};
    for (const auto& [timing, title] :
         {std::pair{"in", "IN-SAMPLE"}, std::pair{"out", "OUT-OF-SAMPLE"}}) {
        txt << "\n" << title << "\n";
        std::snprintf(buf, sizeof(buf), "%-17s", "");
        txt << buf;
        std::vector<const StrategyEval*> cols;
        for (const auto& hd : a.horizons) {
            const WindowEval& ev = timing == std::string("in") ? hd.eval_in : hd.eval_out;
            if (!ev.present) continue;
            for (const auto& s : ev.strategies) {
                cols.push_back(&s);
                const std::string head = std::to_string(hd.h) + "d-" +
                                         (s.variant == "actual" ? "" : "scl-") +
                                         (s.model == "ols" ? "OLS" : "GARCH");
                std::snprintf(buf, sizeof(buf), " %15s", head.c_str());
                txt << buf;
            }
        }
        txt << '\n';
        for (int m = 0; m < 3; ++m) {
            std::snprintf(buf, sizeof(buf), "%-17s", measure_labels[m]);
            txt << buf;
            for (const StrategyEval* s : cols) {
                const std::string cell =
                    fmt(measure_of(s->rm, m) * measure_scale[m], m == 0 ? 3 : 2) + " (" +
                    fmt(he_of(s->he, m), 2) + ")";
                std::snprintf(buf, sizeof(buf), " %15s", cell.c_str());
                txt << buf;
            }
            txt << '\n';
        }
    }
    return txt.str();
}

std::string render_diff_tests_csv(const AssetData& a) {
    std::ostringstream csv;
    csv << "asset,timing,horizon,model,measure,t_stat,bootstrap_se,n_resamples,significant_5pct\n";
    for (const auto& hd : a.horizons) {
        for (const auto& [timing, model, measure, test] : hd.diff_tests) {
            csv << a.label << ',' << timing << ',' << hd.h << ',' << model << ',' << measure
                << ',' << fmt_full(test.t_stat) << ',' << fmt_full(test.bootstrap_se) << ','
                << test.n_resamples << ',' << (test.significant_5pct ? 1 : 0) << '\n';
        }
    }
    return csv.str();
}

std::string render_diff_tests_txt(const AssetData& a) {
    std::ostringstream txt;
    txt << "Actual vs scaled hedging effectiveness, bootstrap t-statistics: " << a.label << "\n"
        << "* marks differences NOT significant at the 5% level.\n";
    char buf[200];
    for (const auto& [timing, title] :
         {std::pair{"in", "IN-SAMPLE"}, std::pair{"out", "OUT-OF-SAMPLE"}}) {
        std::vector<const HorizonData*> hs;
        for (const auto& hd : a.horizons) {
            for (const auto& t : hd.diff_tests) {
                if (std::get<0>(t) == timing) {
                    hs.push_back(&hd);
                    break;
                }
            }
        }
        if (hs.empty()) continue;
        txt << "\n" << title << "\n";
        std::snprintf(buf, sizeof(buf), "%-10s", "");
        txt << buf;
        for (const auto* hd : hs) {
            const std::string head = std::to_string(hd->h) + "d";
            std::snprintf(buf, sizeof(buf), " %11s %11s", (head + " OLS").c_str(),
                          (head + " GARCH").c_str());
            txt << buf;
        }
        txt << '\n';
        const char* row_labels[3] = {"Variance", "VAR", "CVAR"};
        for (int m = 0; m < 3; ++m) {
            std::snprintf(buf, sizeof(buf), "%-10s", row_labels[m]);
            txt << buf;
            for (const auto* hd : hs) {
                for (const std::string model : {"ols", "garch"}) {
                    std::string cell = "-";
                    for (const auto& [tm, md, ms, test] : hd->diff_tests) {
                        if (tm == timing && md == model && ms == measure_names[m]) {
                            cell = fmt(test.t_stat, 2);
                            if (!test.significant_5pct) cell += "*";
                        }
                    }
                    std::snprintf(buf, sizeof(buf), " %11s", cell.c_str());
                    txt << buf;
                }
            }
            txt << '\n';
        }
    }
    return txt.str();
}

std::string render_ohr_paths_csv(const AssetData& a) {
    std::ostringstream csv;
    csv << "asset,horizon,kind,variant,sample,date,ratio\n";
    auto emit = [&](const hedge::HedgePath& hp, const char* kind, const char* variant,
                    const char* sample) {
        for (Eigen::Index i = 0; i < hp.ratios.size(); ++i) {
            csv << a.label << ',' << hp.horizon_h << ',' << kind << ',' << variant << ','
                << sample << ',' << hp.dates[static_cast<std::size_t>(i)].to_iso() << ','
                << fmt_full(hp.ratios[i]) << '\n';
        }
    };
    for (const auto& hd : a.horizons) {
        emit(hd.garch_in, "garch", "actual", "in");
        if (hd.garch_out.ratios.size() > 0) emit(hd.garch_out, "garch", "actual", "out");
        if (hd.scaled_garch_in) emit(*hd.scaled_garch_in, "garch", "scaled", "in");
        if (hd.scaled_garch_out) emit(*hd.scaled_garch_out, "garch", "scaled", "out");
        emit(hd.ols_in, "ols", "actual", "in");
        if (hd.ols_out.ratios.size() > 0) emit(hd.ols_out, "ols", "actual", "out");
        if (hd.scaled_ols_in) emit(*hd.scaled_ols_in, "ols", "scaled", "in");
        if (hd.scaled_ols_out) emit(*hd.scaled_ols_out, "ols", "scaled", "out");
    }
    return csv.str();
}

void write_asset_artifacts(const AssetData& a, const StageSelection& stages, FileSink& sink) {
    if (stages.diagnostics) {
        std::vector<double> sd1{std::nan(""), std::nan("")};
        for (const auto& hd : a.horizons) {
            if (hd.h == 1) {
                sd1[0] = hd.diag_cash.mom.sd_pct;
                sd1[1] = hd.diag_fut.mom.sd_pct;
            }
        }
        sink.write(a.label + "_diagnostics.csv", render_diagnostics_csv(a, sd1), "diagnose");
        sink.write(a.label + "_diagnostics.txt", render_diagnostics_txt(a, sd1), "diagnose");
    }
    if (stages.estimate || stages.scale) {
        const bool with_scaled = stages.scale;
        const std::string producer = with_scaled ? "estimate+scale" : "estimate";
        sink.write(a.label + "_garch_params.csv", render_params_csv(a, with_scaled), producer);
        sink.write(a.label + "_garch_params.txt", render_params_txt(a, with_scaled), producer);
    }
    if (stages.hedge) {
        sink.write(a.label + "_ohr_stats.csv", render_ohr_stats_csv(a), "hedge");
        sink.write(a.label + "_ohr_stats.txt", render_ohr_stats_txt(a), "hedge");
        sink.write(a.label + "_ohr_paths.csv", render_ohr_paths_csv(a), "hedge");
    }
    if (stages.evaluate) {
        sink.write(a.label + "_effectiveness.csv", render_effectiveness_csv(a), "evaluate");
        sink.write(a.label + "_effectiveness.txt", render_effectiveness_txt(a), "evaluate");
        sink.write(a.label + "_diff_tests.csv", render_diff_tests_csv(a), "evaluate");
        sink.write(a.label + "_diff_tests.txt", render_diff_tests_txt(a), "evaluate");
    }
}

}  // namespace

void run(const RunConfig& config, const StageSelection& stages) {
    config.validate();
    fs::create_directories(config.output_dir);
    FileSink sink{fs::path(config.output_dir)};

    try {
        std::vector<std::future<AssetData>> futures;
        futures.reserve(config.assets.size());
        for (const auto& asset : config.assets) {
            futures.push_back(std::async(std::launch::async, [&config, &stages, asset]() {
                return compute_asset(asset, config, stages);
            }));
        }
        std::vector<AssetData> results;
        results.reserve(futures.size());
        for (auto& f : futures) results.push_back(f.get());

        for (const auto& a : results) write_asset_artifacts(a, stages, sink);

        std::ostringstream manifest;
        manifest << "# hedgescale run manifest\n"
                 << "version = " << kVersion << '\n'
                 << "config_hash = 0x" << std::hex << fnv1a(canonical_config(config)) << std::dec
                 << '\n'
                 << "seed = " << *config.seed << '\n';
        for (const auto& [name, stage] : sink.records()) {
            manifest << "file " << name << " produced_by " << stage << '\n';
        }
        sink.write("manifest.txt", manifest.str(), "run");
    } catch (...) {
        sink.remove_all();
        throw;
    }
}

void simulate_fixture(const garch::VechGarchParams& params, Eigen::Index t, std::uint64_t seed,
                      const std::string& out_dir, const std::string& label) {
    params.validate();
    if (t < 1) throw Error(Errc::invalid_params, "fixture length must be >= 1");
    fs::create_directories(out_dir);

    const AlignedPair pair = garch::simulate_vech(params, t, seed);
    auto to_prices = [&](const ReturnSeries& r, AssetRole role, const std::string& leg) {
        PriceSeries p;
        p.label = label + "_" + leg;
        p.role = role;
        p.prices.resize(r.size() + 1);
        p.dates.reserve(static_cast<std::size_t>(r.size()) + 1);
        p.dates.push_back(r.dates.front().plus_days(-1));
        double log_price = std::log(100.0);
        p.prices[0] = 100.0;
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            log_price += r.returns[i];
            p.prices[i + 1] = std::exp(log_price);
            p.dates.push_back(r.dates[static_cast<std::size_t>(i)]);
        }
        return p;
    };
    const PriceSeries cash = to_prices(pair.cash, AssetRole::cash, "cash");
    const PriceSeries fut = to_prices(pair.futures, AssetRole::futures, "futures");
    data::write_prices_csv(cash, (fs::path(out_dir) / (label + "_cash.csv")).string());
    data::write_prices_csv(fut, (fs::path(out_dir) / (label + "_futures.csv")).string());
}

}  // namespace hedgescale::pipeline

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hedgescale/garch.hpp"
#include "hedgescale/series.hpp"

namespace hedgescale::pipeline {

struct AssetConfig {
    std::string label;
    std::string cash_path;
    std::string futures_path;
};

/// Declarative run configuration. Loaded from a flat `key = value` file
/// (see load_config for the schema); CLI flags override individual keys.
struct RunConfig {
    std::vector<AssetConfig> assets;
    std::vector<int> horizons{1, 5, 20};
    Date split_date;
    double tail_alpha = 0.01;
    int n_resamples = 2000;
    std::optional<std::uint64_t> seed;  // mandatory; reproducibility
    std::map<int, int> block_lengths;   // per horizon; defaulted when absent
    std::optional<double> kappa_override;  // default: sample kurtosis
    std::string output_dir = "out";
    int lm_lags = 4;
    int min_observations = 100;
    // Out-of-sample GARCH hedges default to fixed estimation-window
    // parameters (one-step-ahead forecasts under re-filtering). This flag
    // re-estimates on an expanding window at every holdout step instead.
    bool rolling_reestimation = false;

    void validate() const;
    [[nodiscard]] int block_length(int h, Eigen::Index estimation_size) const;
};

/// Parse the config file. Recognized keys:
///   asset        = LABEL, cash.csv, futures.csv   (repeatable)
///   horizons     = 1,5,20
///   split_date   = YYYY-MM-DD
///   tail_alpha   = 0.01
///   n_resamples  = 2000
///   seed         = 42
///   block_len.H  = N                              (per-horizon override)
///   kappa        = sample | <number>
///   output_dir   = path
///   lm_lags      = 4
///   min_observations = 100
/// Lines starting with '#' are comments.
[[nodiscard]] RunConfig load_config(const std::string& path);

/// Stages a subcommand may request; dependencies are resolved internally
/// (everything needs ingest, scale/hedge/evaluate need estimate, ...).
struct StageSelection {
    bool diagnostics = false;
    bool estimate = false;
    bool scale = false;
    bool hedge = false;
    bool evaluate = false;

    static StageSelection all() { return {true, true, true, true, true}; }
};

/// Run the pipeline for every configured asset, writing the table artifacts
/// and a manifest into output_dir. File writes are atomic (temp + rename);
/// on failure every file written by this run is removed and the error is
/// rethrown with (asset, horizon, stage) context. Deterministic for a fixed
/// config and seed, byte for byte.
void run(const RunConfig& config, const StageSelection& stages = StageSelection::all());

/// Write a simulated cash/futures price fixture in the ingest CSV format:
/// returns are drawn from the vech recursion, prices integrate from 100.
/// A run of length T yields T+1 price rows per leg.
void simulate_fixture(const garch::VechGarchParams& params, Eigen::Index t, std::uint64_t seed,
                      const std::string& out_dir, const std::string& label = "sim");

[[nodiscard]] const char* version_string();

}  // namespace hedgescale::pipeline

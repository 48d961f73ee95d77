// Batch CLI for the hedgescale pipeline: ingest -> diagnose -> estimate ->
// scale -> hedge -> evaluate, driven by a declarative config file with flag
// overrides. Every run is deterministic for a fixed config and seed.
#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hedgescale/errors.hpp"
#include "hedgescale/pipeline.hpp"

namespace {

using hedgescale::pipeline::RunConfig;
using hedgescale::pipeline::StageSelection;

struct Overrides {
    std::string config_path;
    std::string output_dir;
    std::string split_date;
    std::string cash_path;
    std::string futures_path;
    std::string label = "asset";
    std::vector<int> horizons;
    std::optional<std::uint64_t> seed;
    std::optional<double> tail_alpha;
    std::optional<int> n_resamples;
    std::optional<double> kappa;
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("-c,--config", ov.config_path, "run configuration file");
    cmd->add_option("--cash", ov.cash_path, "cash price CSV (alternative to a config file)");
    cmd->add_option("--futures", ov.futures_path, "futures price CSV");
    cmd->add_option("--label", ov.label, "asset label for flag-selected inputs");
    cmd->add_option("-o,--out", ov.output_dir, "output directory (overrides config)");
    cmd->add_option("--split", ov.split_date, "estimation/holdout split date (YYYY-MM-DD)");
    cmd->add_option("--horizons", ov.horizons, "horizon list, e.g. --horizons 1 5 20");
    cmd->add_option("--seed", ov.seed, "random seed (overrides config)");
    cmd->add_option("--tail-alpha", ov.tail_alpha, "VaR/CVaR tail probability");
    cmd->add_option("--resamples", ov.n_resamples, "bootstrap resamples");
    cmd->add_option("--kappa", ov.kappa, "kurtosis override for the aggregation formulas");
}

RunConfig make_config(const Overrides& ov) {
    RunConfig cfg;
    if (!ov.config_path.empty()) {
        cfg = hedgescale::pipeline::load_config(ov.config_path);
    }
    if (!ov.cash_path.empty() || !ov.futures_path.empty()) {
        if (ov.cash_path.empty() || ov.futures_path.empty()) {
            throw hedgescale::Error(hedgescale::Errc::invalid_config,
                                    "--cash and --futures must be given together");
        }
        cfg.assets.push_back({ov.label, ov.cash_path, ov.futures_path});
    }
    if (cfg.assets.empty()) {
        throw hedgescale::Error(hedgescale::Errc::invalid_config,
                                "no assets: pass --config or --cash/--futures");
    }
    if (!ov.output_dir.empty()) cfg.output_dir = ov.output_dir;
    if (!ov.split_date.empty()) cfg.split_date = hedgescale::Date::from_iso(ov.split_date);
    if (!ov.horizons.empty()) cfg.horizons = ov.horizons;
    if (ov.seed) cfg.seed = ov.seed;
    if (ov.tail_alpha) cfg.tail_alpha = *ov.tail_alpha;
    if (ov.n_resamples) cfg.n_resamples = *ov.n_resamples;
    if (ov.kappa) cfg.kappa_override = ov.kappa;
    return cfg;
}

int run_stages(const Overrides& ov, const StageSelection& stages) {
    try {
        hedgescale::pipeline::run(make_config(ov), stages);
        return 0;
    } catch (const hedgescale::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(hedgescale::pipeline::version_string()) +
                 " - multi-horizon futures hedging with scaled volatilities"};
    app.require_subcommand(1);

    Overrides ov;
    struct FixtureArgs {
        std::string out_dir = "fixture";
        std::string label = "sim";
        std::int64_t t = 2601;
        std::uint64_t seed = 1;
        double omega_s = 1.68e-6, alpha_s = 0.0565, beta_s = 0.9299;
        double omega_f = 2.20e-6, alpha_f = 0.0570, beta_f = 0.9272;
        double omega_sf = 1.89e-6, alpha_sf = 0.0561, beta_sf = 0.9290;
        double mu_s = 9e-5, mu_f = 9e-5;
    } fx;

    CLI::App* diagnose = app.add_subcommand("diagnose", "descriptive statistics and tests");
    CLI::App* estimate = app.add_subcommand("estimate", "direct GARCH estimates per horizon");
    CLI::App* scale = app.add_subcommand("scale", "estimates plus aggregated parameters");
    CLI::App* hedge = app.add_subcommand("hedge", "hedge-ratio paths and statistics");
    CLI::App* evaluate = app.add_subcommand("evaluate", "effectiveness and difference tests");
    CLI::App* run_all = app.add_subcommand("run-all", "full pipeline, all artifacts");
    for (CLI::App* cmd : {diagnose, estimate, scale, hedge, evaluate, run_all}) {
        add_common_flags(cmd, ov);
    }

    CLI::App* fixture = app.add_subcommand("simulate-fixture", "write a simulated price fixture");
    fixture->add_option("-o,--out", fx.out_dir, "output directory");
    fixture->add_option("--label", fx.label, "fixture label");
    fixture->add_option("--T", fx.t, "number of base-frequency returns");
    fixture->add_option("--seed", fx.seed, "random seed")->required();
    fixture->add_option("--omega-s", fx.omega_s, "cash variance intercept");
    fixture->add_option("--alpha-s", fx.alpha_s, "cash ARCH coefficient");
    fixture->add_option("--beta-s", fx.beta_s, "cash GARCH coefficient");
    fixture->add_option("--omega-f", fx.omega_f, "futures variance intercept");
    fixture->add_option("--alpha-f", fx.alpha_f, "futures ARCH coefficient");
    fixture->add_option("--beta-f", fx.beta_f, "futures GARCH coefficient");
    fixture->add_option("--omega-sf", fx.omega_sf, "covariance intercept");
    fixture->add_option("--alpha-sf", fx.alpha_sf, "covariance ARCH coefficient");
    fixture->add_option("--beta-sf", fx.beta_sf, "covariance GARCH coefficient");
    fixture->add_option("--mu-s", fx.mu_s, "cash mean return");
    fixture->add_option("--mu-f", fx.mu_f, "futures mean return");

    CLI11_PARSE(app, argc, argv);

    if (fixture->parsed()) {
        try {
            hedgescale::garch::VechGarchParams p;
            p.s = {fx.omega_s, fx.alpha_s, fx.beta_s};
            p.f = {fx.omega_f, fx.alpha_f, fx.beta_f};
            p.sf = {fx.omega_sf, fx.alpha_sf, fx.beta_sf};
            p.mu_s = fx.mu_s;
            p.mu_f = fx.mu_f;
            hedgescale::pipeline::simulate_fixture(p, fx.t, fx.seed, fx.out_dir, fx.label);
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "error: stage=simulate-fixture: " << e.what() << "\n";
            return 1;
        }
    }

    StageSelection stages;
    if (diagnose->parsed()) {
        stages.diagnostics = true;
    } else if (estimate->parsed()) {
        stages.estimate = true;
    } else if (scale->parsed()) {
        stages.estimate = stages.scale = true;
    } else if (hedge->parsed()) {
        stages.estimate = stages.hedge = true;
    } else if (evaluate->parsed()) {
        stages.estimate = stages.scale = stages.hedge = stages.evaluate = true;
    } else {
        stages = StageSelection::all();
    }
    return run_stages(ov, stages);
}

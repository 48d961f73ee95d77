#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hedgescale/data_ingest.hpp"
#include "hedgescale/errors.hpp"
#include "hedgescale/pipeline.hpp"
#include "oracles.hpp"

using namespace hedgescale;
namespace fs = std::filesystem;

namespace {

garch::VechGarchParams fixture_params() {
    garch::VechGarchParams p;
    p.s = {1.68e-6, 0.0565, 0.9299};
    p.f = {2.20e-6, 0.0570, 0.9272};
    p.sf = {1.89e-6, 0.0561, 0.9290};
    p.mu_s = 9e-5;
    p.mu_f = 9e-5;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("simulate_fixture round-trips through ingestion") {
    const fs::path dir = fresh_dir("hs_fixture_rt");
    pipeline::simulate_fixture(fixture_params(), 2601, 5, dir.string(), "rt");

    const PriceSeries cash = data::load_prices((dir / "rt_cash.csv").string());
    CHECK(cash.size() == 2602);  // T returns -> T+1 price rows

    const ReturnSeries r = data::log_returns(cash);
    const AlignedPair sim = garch::simulate_vech(fixture_params(), 2601, 5);
    REQUIRE(r.size() == sim.cash.returns.size());
    CHECK((r.returns - sim.cash.returns).cwiseAbs().maxCoeff() < 1e-12);

    // deterministic per seed
    const fs::path dir2 = fresh_dir("hs_fixture_rt2");
    pipeline::simulate_fixture(fixture_params(), 2601, 5, dir2.string(), "rt");
    CHECK(slurp(dir / "rt_cash.csv") == slurp(dir2 / "rt_cash.csv"));
    CHECK(slurp(dir / "rt_futures.csv") == slurp(dir2 / "rt_futures.csv"));
}

TEST_CASE("config parsing and validation") {
    const fs::path dir = fresh_dir("hs_cfg");
    const fs::path cfg_path = dir / "run.cfg";
    {
        std::ofstream out(cfg_path);
        out << "# comment\n"
            << "asset = SIM, " << (dir / "sim_cash.csv").string() << ", "
            << (dir / "sim_futures.csv").string() << "\n"
            << "horizons = 1,5\n"
            << "split_date = 2004-01-01\n"
            << "seed = 9\n"
            << "n_resamples = 200\n"
            << "block_len.5 = 15\n"
            << "output_dir = " << (dir / "out").string() << "\n";
    }
    const auto cfg = pipeline::load_config(cfg_path.string());
    CHECK(cfg.assets.size() == 1);
    CHECK(cfg.assets[0].label == "SIM");
    CHECK(cfg.horizons == std::vector<int>{1, 5});
    CHECK(cfg.split_date == Date(2004, 1, 1));
    CHECK(cfg.seed == 9);
    CHECK(cfg.block_lengths.at(5) == 15);
    CHECK(cfg.block_length(5, 1000) == 15);
    CHECK(cfg.block_length(1, 1000) == 50);

    pipeline::RunConfig no_seed = cfg;
    no_seed.seed.reset();
    CHECK_THROWS_AS(no_seed.validate(), Error);

    pipeline::RunConfig bad_alpha = cfg;
    bad_alpha.tail_alpha = 0.7;
    CHECK_THROWS_AS(bad_alpha.validate(), Error);
}

TEST_CASE("pipeline smoke run emits every artifact kind") {
    const fs::path dir = fresh_dir("hs_smoke");
    pipeline::simulate_fixture(fixture_params(), 2801, 11, dir.string(), "sim");

    pipeline::RunConfig cfg;
    cfg.assets = {{"SIM", (dir / "sim_cash.csv").string(), (dir / "sim_futures.csv").string()}};
    cfg.horizons = {1, 5, 20};
    // fixture dates start 2001-01-01; split to keep ~100 20-period blocks
    cfg.split_date = Date(2001, 1, 2).plus_days(2004);
    cfg.seed = 77;
    cfg.n_resamples = 300;
    cfg.output_dir = (dir / "out").string();
    pipeline::run(cfg);

    const char* artifacts[] = {
        "SIM_diagnostics.csv",  "SIM_diagnostics.txt",   "SIM_garch_params.csv",
        "SIM_garch_params.txt", "SIM_ohr_stats.csv",     "SIM_ohr_stats.txt",
        "SIM_ohr_paths.csv",    "SIM_effectiveness.csv", "SIM_effectiveness.txt",
        "SIM_diff_tests.csv",   "SIM_diff_tests.txt",    "manifest.txt",
    };
    for (const char* name : artifacts) {
        INFO(name);
        CHECK(fs::exists(dir / "out" / name));
    }

    // csv artifacts parse: header plus data rows with a fixed column count
    for (const char* name : {"SIM_diagnostics.csv", "SIM_garch_params.csv", "SIM_ohr_stats.csv",
                             "SIM_effectiveness.csv", "SIM_diff_tests.csv", "SIM_ohr_paths.csv"}) {
        std::ifstream in(dir / "out" / name);
        std::string header;
        REQUIRE(std::getline(in, header));
        const auto commas = std::count(header.begin(), header.end(), ',');
        std::string line;
        int rows = 0;
        while (std::getline(in, line)) {
            CHECK(std::count(line.begin(), line.end(), ',') == commas);
            ++rows;
        }
        INFO(name);
        CHECK(rows > 0);
    }

    // manifest names every emitted file with its producing stage
    const std::string manifest = slurp(dir / "out" / "manifest.txt");
    for (const char* name : artifacts) {
        if (std::string(name) == "manifest.txt") continue;
        CHECK(manifest.find(name) != std::string::npos);
    }
    CHECK(manifest.find("config_hash") != std::string::npos);
    CHECK(manifest.find("seed = 77") != std::string::npos);
}

TEST_CASE("rolling re-estimation changes the out-of-sample path deterministically") {
    const fs::path dir = fresh_dir("hs_rolling");
    pipeline::simulate_fixture(fixture_params(), 540, 17, dir.string(), "sim");

    pipeline::RunConfig cfg;
    cfg.assets = {{"SIM", (dir / "sim_cash.csv").string(), (dir / "sim_futures.csv").string()}};
    cfg.horizons = {1};
    // estimation ~500 observations, holdout ~40
    cfg.split_date = Date(2001, 1, 2).plus_days(500);
    cfg.seed = 5;
    cfg.n_resamples = 100;
    cfg.min_observations = 100;

    auto out_paths = [&](const std::string& sub, bool rolling) {
        pipeline::RunConfig c = cfg;
        c.output_dir = (dir / sub).string();
        c.rolling_reestimation = rolling;
        pipeline::StageSelection stages;
        stages.estimate = stages.hedge = true;
        pipeline::run(c, stages);
        std::ifstream in(dir / sub / "SIM_ohr_paths.csv");
        std::string line, out;
        while (std::getline(in, line)) {
            if (line.find(",garch,actual,out,") != std::string::npos) out += line + "\n";
        }
        return out;
    };

    const std::string fixed1 = out_paths("fixed1", false);
    const std::string fixed2 = out_paths("fixed2", false);
    const std::string rolled = out_paths("rolled", true);
    CHECK(!fixed1.empty());
    CHECK(fixed1 == fixed2);   // deterministic
    CHECK(fixed1 != rolled);   // refitting moves the forecasts
}

TEST_CASE("pipeline propagates stage-tagged errors and removes partial output") {
    const fs::path dir = fresh_dir("hs_fail");
    pipeline::simulate_fixture(fixture_params(), 400, 13, dir.string(), "sim");

    pipeline::RunConfig cfg;
    cfg.assets = {{"SIM", (dir / "sim_cash.csv").string(), (dir / "missing.csv").string()}};
    cfg.horizons = {1};
    cfg.split_date = Date(2001, 6, 1);
    cfg.seed = 3;
    cfg.output_dir = (dir / "out").string();

    try {
        pipeline::run(cfg);
        FAIL("expected MissingFile");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::missing_file);
        CHECK(std::string(e.what()).find("stage=ingest") != std::string::npos);
        CHECK(std::string(e.what()).find("asset=SIM") != std::string::npos);
    }
    CHECK_FALSE(fs::exists(dir / "out" / "manifest.txt"));
    // no partial artifacts left behind
    int files = 0;
    if (fs::exists(dir / "out")) {
        for (const auto& entry : fs::directory_iterator(dir / "out")) {
            (void)entry;
            ++files;
        }
    }
    CHECK(files == 0);
}

// SPDX-License-Identifier: Apache-2.0
//
// Config parsing, CSV contract, determinism of the experiment runners.

#include <doctest.h>

#include "irsim/experiments.hpp"
#include "irsim/scenario.hpp"

#include <sstream>

using namespace irsim;

namespace
{

ScenarioConfig tiny_config()
{
    ScenarioConfig cfg;
    cfg.bs_antennas = 4;
    cfg.irs_units = 1;
    cfg.elements_per_unit = 8;
    cfg.users = 2;
    cfg.streams = 2;
    cfg.trials = 3;
    cfg.seed = 42;
    cfg.frame_slots = 3;
    cfg.eval_samples = 4;
    cfg.ao.max_iters = 30;
    cfg.pso = PsoParams{4, 0.7, 1.5, 1.5, 3, 3, 2};
    cfg.sweep.elements = {4, 8};
    cfg.sweep.rho_grid = {0.2, 0.9};
    cfg.sweep.units_max = 2;
    return cfg;
}

} // namespace

TEST_CASE("dbm conversion: 30 dBm is exactly one watt")
{
    CHECK(dbm_to_watts(30.0) == 1.0);
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(watts_to_dbm(1.0) == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("config: unknown keys are errors, nested included")
{
    CHECK_THROWS_AS((void)config_from_json(nlohmann::json::parse(R"({"bs_antenas": 8})")),
                    config_error);
    CHECK_THROWS_AS(
        (void)config_from_json(nlohmann::json::parse(R"({"sweep": {"element": [4]}})")),
        config_error);
    CHECK_THROWS_AS((void)config_from_json(nlohmann::json::parse(R"({"pso": {"swam": 3}})")),
                    config_error);
    // valid keys load fine
    const ScenarioConfig cfg =
        config_from_json(nlohmann::json::parse(R"({"users": 4, "pso": {"swarm": 7}})"));
    CHECK(cfg.users == 4);
    CHECK(cfg.pso.swarm == 7);
}

TEST_CASE("config: value validation")
{
    CHECK_THROWS_AS((void)config_from_json(nlohmann::json::parse(R"({"users": 0})")), config_error);
    CHECK_THROWS_AS((void)config_from_json(nlohmann::json::parse(R"({"rho": 1.5})")), config_error);
    CHECK_THROWS_AS((void)config_from_json(nlohmann::json::parse(R"({"streams": 9})")),
                    config_error);
    CHECK_THROWS_AS((void)config_from_json(nlohmann::json::parse(R"({"users": "three"})")),
                    config_error);
}

TEST_CASE("config: round trip preserves the hash")
{
    ScenarioConfig cfg = tiny_config();
    const std::string h1 = config_hash(cfg);
    const ScenarioConfig back = config_from_json(config_to_json(cfg));
    CHECK(config_hash(back) == h1);
    // any change moves the hash
    cfg.noise_dbm += 1.0;
    CHECK(config_hash(cfg) != h1);
}

TEST_CASE("config: jakes override of rho")
{
    ScenarioConfig cfg;
    cfg.rho = 0.4;
    CHECK(cfg.temporal_rho() == 0.4);
    cfg.doppler_hz = 10.0;
    cfg.csi_delay_s = 1e-3;
    CHECK(cfg.temporal_rho() == doctest::Approx(bessel_j0(two_pi * 0.01)).epsilon(1e-12));
}

TEST_CASE("csv: header, row format, 12 significant digits, LF endings")
{
    ExperimentResult r;
    r.name = "demo";
    r.rows.push_back({"elements", 16.0, "ao_dual", 1.0 / 3.0, 0.001234567890123, 30});
    std::ostringstream os;
    write_csv(r, os);
    const std::string text = os.str();
    CHECK(text == "sweep_var,value,scheme,mean,stderr,trials\n"
                  "elements,16,ao_dual,0.333333333333,0.00123456789012,30\n");
    CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("sidecar embeds seed, config hash and the full config")
{
    const ScenarioConfig cfg = tiny_config();
    ExperimentResult r;
    r.name = "demo";
    r.seed = cfg.seed;
    r.cfg_hash = config_hash(cfg);
    const nlohmann::json j = result_sidecar(cfg, r);
    CHECK(j.at("seed").get<std::uint64_t>() == 42);
    CHECK(j.at("config_hash").get<std::string>() == config_hash(cfg));
    CHECK(j.at("config").at("users").get<int>() == 2);
}

TEST_CASE("experiments: identical (config, seed) gives byte-identical CSVs at 1 and 4 threads")
{
    const ScenarioConfig cfg = tiny_config();

    const auto csv_of = [](const ExperimentResult &r) {
        std::ostringstream os;
        write_csv(r, os);
        return os.str();
    };

    CHECK(csv_of(run_sumrate_vs_elements(cfg, 1)) == csv_of(run_sumrate_vs_elements(cfg, 4)));
    CHECK(csv_of(run_rank_analysis(cfg, 1)) == csv_of(run_rank_analysis(cfg, 4)));
    CHECK(csv_of(run_aasr_vs_rho(cfg, 1)) == csv_of(run_aasr_vs_rho(cfg, 4)));
    CHECK(csv_of(run_ao_trace(cfg, 1)) == csv_of(run_ao_trace(cfg, 4)));
}

TEST_CASE("experiments: changing the seed changes the results")
{
    ScenarioConfig cfg = tiny_config();
    const ExperimentResult a = run_rank_analysis(cfg, 1);
    cfg.seed = 43;
    const ExperimentResult b = run_rank_analysis(cfg, 1);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        any_diff |= (a.rows[i].mean != b.rows[i].mean);
    CHECK(any_diff);
}

TEST_CASE("ao-trace: clean run has no property violation and both schemes present")
{
    const ScenarioConfig cfg = tiny_config();
    const ExperimentResult r = run_ao_trace(cfg, 1);
    CHECK_FALSE(r.property_violation);
    bool has_dual = false, has_ucmo = false;
    for (const auto &row : r.rows)
    {
        has_dual |= (row.scheme == "dual");
        has_ucmo |= (row.scheme == "ucmo");
        CHECK(row.sweep_var == "iteration");
    }
    CHECK(has_dual);
    CHECK(has_ucmo);
    // trace length stays within the iteration budget (+1 for the initial value)
    CHECK(r.rows.size() <= 2 * static_cast<std::size_t>(cfg.ao.max_iters + 1));
}

TEST_CASE("sumrate rows: all schemes at every sweep point")
{
    const ScenarioConfig cfg = tiny_config();
    const ExperimentResult r = run_sumrate_vs_elements(cfg, 2);
    CHECK(r.rows.size() == 2 * 6); // two sweep points, six schemes
    for (const auto &row : r.rows)
    {
        CHECK(row.trials == cfg.trials);
        CHECK(std::isfinite(row.mean));
    }
}

// SPDX-License-Identifier: Apache-2.0
//
// irsim: IRS-assisted MIMO downlink simulation and reflection optimization
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------
//
// Experiment driver. Each subcommand sweeps one figure family and writes
// <out>/<subcommand>.csv plus a JSON sidecar with the resolved config.
// Exit codes: 0 success, 2 config error, 3 property violation (ao-trace).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "irsim/experiments.hpp"
#include "irsim/scenario.hpp"

namespace
{

struct CommonOptions
{
    std::string config_path;
    std::string out_dir = "results";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
    int threads = 1;
};

void add_common(CLI::App *cmd, CommonOptions &opts)
{
    cmd->add_option("--config", opts.config_path, "Scenario config file (JSON)");
    cmd->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--seed", opts.seed, "Override the config RNG seed")
        ->each([&opts](const std::string &) { opts.seed_set = true; });
    cmd->add_option("--trials", opts.trials, "Override the per-point trial count");
    cmd->add_option("--threads", opts.threads, "Worker threads for trials")->capture_default_str();
}

irsim::ScenarioConfig resolve_config(const CommonOptions &opts)
{
    irsim::ScenarioConfig cfg;
    if (!opts.config_path.empty())
        cfg = irsim::load_config_file(opts.config_path);
    if (opts.seed_set)
        cfg.seed = opts.seed;
    if (opts.trials > 0)
        cfg.trials = opts.trials;
    cfg.validate();
    return cfg;
}

int write_outputs(const irsim::ScenarioConfig &cfg, const irsim::ExperimentResult &result,
                  const std::string &out_dir)
{
    std::filesystem::create_directories(out_dir);
    const std::string base = out_dir + "/" + result.name;
    {
        std::ofstream csv(base + ".csv", std::ios::binary); // LF endings on every platform
        irsim::write_csv(result, csv);
        if (!csv)
        {
            std::cerr << "error: cannot write " << base << ".csv\n";
            return 2;
        }
    }
    {
        std::ofstream sidecar(base + ".json", std::ios::binary);
        sidecar << irsim::result_sidecar(cfg, result).dump(2) << '\n';
    }
    std::cout << result.name << ": wrote " << base << ".csv (" << result.rows.size() << " rows)\n";
    if (result.property_violation)
    {
        std::cerr << "property violation: " << result.violation_message << '\n';
        return 3;
    }
    return 0;
}

int run_subcommand(const CommonOptions &opts,
                   const std::function<irsim::ExperimentResult(const irsim::ScenarioConfig &, int)> &runner)
{
    try
    {
        const irsim::ScenarioConfig cfg = resolve_config(opts);
        const irsim::ExperimentResult result = runner(cfg, std::max(1, opts.threads));
        return write_outputs(cfg, result, opts.out_dir);
    }
    catch (const irsim::config_error &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"irsim: IRS-assisted MIMO downlink experiments"};
    app.require_subcommand(1);

    CommonOptions sumrate_opts, rank_opts, aasr_opts, trace_opts;
    CLI::App *sumrate = app.add_subcommand("sumrate", "Sum-rate vs IRS element count (AO families)");
    add_common(sumrate, sumrate_opts);
    CLI::App *rank = app.add_subcommand("rank", "Channel-correlation eigenvalue spectra vs IRS units");
    add_common(rank, rank_opts);
    CLI::App *aasr = app.add_subcommand("aasr", "Two-timescale AASR vs temporal correlation");
    add_common(aasr, aasr_opts);
    CLI::App *trace = app.add_subcommand("ao-trace", "Per-iteration AO objective trace");
    add_common(trace, trace_opts);

    CLI11_PARSE(app, argc, argv);

    if (sumrate->parsed())
        return run_subcommand(sumrate_opts, [](const irsim::ScenarioConfig &c, int t) {
            return irsim::run_sumrate_vs_elements(c, t);
        });
    if (rank->parsed())
        return run_subcommand(rank_opts, [](const irsim::ScenarioConfig &c, int t) {
            return irsim::run_rank_analysis(c, t);
        });
    if (aasr->parsed())
        return run_subcommand(aasr_opts, [](const irsim::ScenarioConfig &c, int t) {
            return irsim::run_aasr_vs_rho(c, t);
        });
    if (trace->parsed())
        return run_subcommand(trace_opts, [](const irsim::ScenarioConfig &c, int t) {
            return irsim::run_ao_trace(c, t);
        });
    return 0;
}

// SPDX-License-Identifier: Apache-2.0
//
// irsim: IRS-assisted MIMO downlink simulation and reflection optimization
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "channel.hpp"
#include "errors.hpp"
#include "two_timescale.hpp"

namespace irsim
{

// Thrown for malformed configs (unknown keys, bad values, unreadable files);
// the CLI maps it to exit code 2.
class config_error : public std::runtime_error
{
public:
    explicit config_error(const std::string &what) : std::runtime_error(what) {}
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 30.0 + 10.0 * std::log10(watts); }

// All experiment parameters. Every field has a desk-scale default; a config
// file overrides any subset. Unknown keys anywhere are errors so sweep typos
// cannot silently fall back to defaults.
struct ScenarioConfig
{
    // System sizes
    int bs_antennas = 8;
    int irs_units = 1;
    int elements_per_unit = 16;
    int users = 3;
    int streams = 2;

    // Powers (linear values derived from dBm on load)
    double power_dbm = 30.0;
    double noise_dbm = -80.0;

    // Carrier and fading
    double carrier_ghz = 28.0;
    double rician_kappa = 0.7;
    double rho = 0.9;          // used unless doppler_hz >= 0
    double doppler_hz = -1.0;  // with csi_delay_s, overrides rho via Jakes
    double csi_delay_s = 1e-3;
    int delay_slots = 1;
    int frame_slots = 50;
    int phase_bits = 0; // 0 = continuous

    // Monte Carlo
    std::uint64_t seed = 1;
    int trials = 30;
    int eval_samples = 40; // validation draws for AASR scheme comparison

    // Nested groups
    PathLossParams path_loss{1e-3, 1e-3, 2.2, 2.8, 1.0};

    struct Direct
    {
        bool enabled = true;
        double c = 1e-3;
        double alpha = 3.5;
        double blockage_db = 25.0;
    } direct;

    struct Geometry
    {
        double user_center_x = 40.0;
        double user_center_y = 0.0;
        double user_radius = 10.0;
        double irs_x = 35.0;
        double irs_y_step = 5.0;
        double irs_z = 5.0;
        double bs_z = 10.0;
        double user_z = 1.5;
    } geometry;

    struct SparseChannel
    {
        int nlos_paths = 3;
        double nlos_power_db = -10.0; // per NLoS path, relative to the LoS path
    } channel;

    struct Ao
    {
        double tol = 1e-6;
        int max_iters = 200;
    } ao;

    PsoParams pso{};

    struct Sweep
    {
        std::vector<int> elements{8, 16, 32, 64};
        std::vector<double> rho_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
        int units_max = 3;
    } sweep;

    double power_watts() const { return dbm_to_watts(power_dbm); }
    double noise_watts() const { return dbm_to_watts(noise_dbm); }
    double wavelength() const { return 299792458.0 / (carrier_ghz * 1e9); }

    double temporal_rho() const
    {
        if (doppler_hz >= 0.0)
            return std::clamp(jakes_correlation(doppler_hz, csi_delay_s), 0.0, 1.0);
        return rho;
    }

    void validate() const
    {
        if (bs_antennas <= 0 || irs_units < 0 || elements_per_unit <= 0 || users <= 0 || streams <= 0)
            throw config_error("config: counts must be positive");
        if (streams > std::min(bs_antennas, users))
            throw config_error("config: streams must not exceed min(bs_antennas, users)");
        if (rho < 0.0 || rho > 1.0 || rician_kappa < 0.0 || rician_kappa > 1.0)
            throw config_error("config: rho and rician_kappa must lie in [0, 1]");
        if (trials < 1 || eval_samples < 1 || frame_slots < 1 || delay_slots < 0)
            throw config_error("config: trials, eval_samples, frame_slots must be >= 1");
        if (phase_bits < 0)
            throw config_error("config: phase_bits must be >= 0");
        for (int n : sweep.elements)
            if (n <= 0)
                throw config_error("config: swept element counts must be positive");
        for (double r : sweep.rho_grid)
            if (r < 0.0 || r > 1.0)
                throw config_error("config: swept rho values must lie in [0, 1]");
        if (sweep.units_max < 1)
            throw config_error("config: sweep.units_max must be >= 1");
    }
};

namespace detail
{

inline void check_keys(const nlohmann::json &j, const std::set<std::string> &allowed,
                       const std::string &scope)
{
    if (!j.is_object())
        throw config_error("config: '" + scope + "' must be a JSON object");
    for (const auto &item : j.items())
        if (allowed.find(item.key()) == allowed.end())
            throw config_error("config: unknown key '" + item.key() + "' in " + scope);
}

template <typename T>
inline void load_if(const nlohmann::json &j, const char *key, T &out)
{
    if (j.contains(key))
    {
        try
        {
            out = j.at(key).get<T>();
        }
        catch (const nlohmann::json::exception &e)
        {
            throw config_error(std::string("config: bad value for '") + key + "': " + e.what());
        }
    }
}

} // namespace detail

inline ScenarioConfig config_from_json(const nlohmann::json &j)
{
    ScenarioConfig cfg;
    detail::check_keys(
        j,
        {"bs_antennas", "irs_units", "elements_per_unit", "users", "streams", "power_dbm",
         "noise_dbm", "carrier_ghz", "rician_kappa", "rho", "doppler_hz", "csi_delay_s",
         "delay_slots", "frame_slots", "phase_bits", "seed", "trials", "eval_samples", "path_loss",
         "direct", "geometry", "channel", "ao", "pso", "sweep"},
        "top level");

    detail::load_if(j, "bs_antennas", cfg.bs_antennas);
    detail::load_if(j, "irs_units", cfg.irs_units);
    detail::load_if(j, "elements_per_unit", cfg.elements_per_unit);
    detail::load_if(j, "users", cfg.users);
    detail::load_if(j, "streams", cfg.streams);
    detail::load_if(j, "power_dbm", cfg.power_dbm);
    detail::load_if(j, "noise_dbm", cfg.noise_dbm);
    detail::load_if(j, "carrier_ghz", cfg.carrier_ghz);
    detail::load_if(j, "rician_kappa", cfg.rician_kappa);
    detail::load_if(j, "rho", cfg.rho);
    detail::load_if(j, "doppler_hz", cfg.doppler_hz);
    detail::load_if(j, "csi_delay_s", cfg.csi_delay_s);
    detail::load_if(j, "delay_slots", cfg.delay_slots);
    detail::load_if(j, "frame_slots", cfg.frame_slots);
    detail::load_if(j, "phase_bits", cfg.phase_bits);
    detail::load_if(j, "seed", cfg.seed);
    detail::load_if(j, "trials", cfg.trials);
    detail::load_if(j, "eval_samples", cfg.eval_samples);

    if (j.contains("path_loss"))
    {
        const auto &p = j.at("path_loss");
        detail::check_keys(p, {"c1", "c2", "alpha1", "alpha2", "d0"}, "path_loss");
        detail::load_if(p, "c1", cfg.path_loss.c1);
        detail::load_if(p, "c2", cfg.path_loss.c2);
        detail::load_if(p, "alpha1", cfg.path_loss.alpha1);
        detail::load_if(p, "alpha2", cfg.path_loss.alpha2);
        detail::load_if(p, "d0", cfg.path_loss.d0);
    }
    if (j.contains("direct"))
    {
        const auto &p = j.at("direct");
        detail::check_keys(p, {"enabled", "c", "alpha", "blockage_db"}, "direct");
        detail::load_if(p, "enabled", cfg.direct.enabled);
        detail::load_if(p, "c", cfg.direct.c);
        detail::load_if(p, "alpha", cfg.direct.alpha);
        detail::load_if(p, "blockage_db", cfg.direct.blockage_db);
    }
    if (j.contains("geometry"))
    {
        const auto &p = j.at("geometry");
        detail::check_keys(p,
                           {"user_center_x", "user_center_y", "user_radius", "irs_x", "irs_y_step",
                            "irs_z", "bs_z", "user_z"},
                           "geometry");
        detail::load_if(p, "user_center_x", cfg.geometry.user_center_x);
        detail::load_if(p, "user_center_y", cfg.geometry.user_center_y);
        detail::load_if(p, "user_radius", cfg.geometry.user_radius);
        detail::load_if(p, "irs_x", cfg.geometry.irs_x);
        detail::load_if(p, "irs_y_step", cfg.geometry.irs_y_step);
        detail::load_if(p, "irs_z", cfg.geometry.irs_z);
        detail::load_if(p, "bs_z", cfg.geometry.bs_z);
        detail::load_if(p, "user_z", cfg.geometry.user_z);
    }
    if (j.contains("channel"))
    {
        const auto &p = j.at("channel");
        detail::check_keys(p, {"nlos_paths", "nlos_power_db"}, "channel");
        detail::load_if(p, "nlos_paths", cfg.channel.nlos_paths);
        detail::load_if(p, "nlos_power_db", cfg.channel.nlos_power_db);
    }
    if (j.contains("ao"))
    {
        const auto &p = j.at("ao");
        detail::check_keys(p, {"tol", "max_iters"}, "ao");
        detail::load_if(p, "tol", cfg.ao.tol);
        detail::load_if(p, "max_iters", cfg.ao.max_iters);
    }
    if (j.contains("pso"))
    {
        const auto &p = j.at("pso");
        detail::check_keys(p, {"swarm", "inertia", "c1", "c2", "iterations", "batches", "batch_size"},
                           "pso");
        detail::load_if(p, "swarm", cfg.pso.swarm);
        detail::load_if(p, "inertia", cfg.pso.inertia);
        detail::load_if(p, "c1", cfg.pso.c1);
        detail::load_if(p, "c2", cfg.pso.c2);
        detail::load_if(p, "iterations", cfg.pso.iterations);
        detail::load_if(p, "batches", cfg.pso.batches);
        detail::load_if(p, "batch_size", cfg.pso.batch_size);
    }
    if (j.contains("sweep"))
    {
        const auto &p = j.at("sweep");
        detail::check_keys(p, {"elements", "rho_grid", "units_max"}, "sweep");
        detail::load_if(p, "elements", cfg.sweep.elements);
        detail::load_if(p, "rho_grid", cfg.sweep.rho_grid);
        detail::load_if(p, "units_max", cfg.sweep.units_max);
    }

    cfg.validate();
    return cfg;
}

inline nlohmann::json config_to_json(const ScenarioConfig &cfg)
{
    nlohmann::json j;
    j["bs_antennas"] = cfg.bs_antennas;
    j["irs_units"] = cfg.irs_units;
    j["elements_per_unit"] = cfg.elements_per_unit;
    j["users"] = cfg.users;
    j["streams"] = cfg.streams;
    j["power_dbm"] = cfg.power_dbm;
    j["noise_dbm"] = cfg.noise_dbm;
    j["carrier_ghz"] = cfg.carrier_ghz;
    j["rician_kappa"] = cfg.rician_kappa;
    j["rho"] = cfg.rho;
    j["doppler_hz"] = cfg.doppler_hz;
    j["csi_delay_s"] = cfg.csi_delay_s;
    j["delay_slots"] = cfg.delay_slots;
    j["frame_slots"] = cfg.frame_slots;
    j["phase_bits"] = cfg.phase_bits;
    j["seed"] = cfg.seed;
    j["trials"] = cfg.trials;
    j["eval_samples"] = cfg.eval_samples;
    j["path_loss"] = {{"c1", cfg.path_loss.c1},
                      {"c2", cfg.path_loss.c2},
                      {"alpha1", cfg.path_loss.alpha1},
                      {"alpha2", cfg.path_loss.alpha2},
                      {"d0", cfg.path_loss.d0}};
    j["direct"] = {{"enabled", cfg.direct.enabled},
                   {"c", cfg.direct.c},
                   {"alpha", cfg.direct.alpha},
                   {"blockage_db", cfg.direct.blockage_db}};
    j["geometry"] = {{"user_center_x", cfg.geometry.user_center_x},
                     {"user_center_y", cfg.geometry.user_center_y},
                     {"user_radius", cfg.geometry.user_radius},
                     {"irs_x", cfg.geometry.irs_x},
                     {"irs_y_step", cfg.geometry.irs_y_step},
                     {"irs_z", cfg.geometry.irs_z},
                     {"bs_z", cfg.geometry.bs_z},
                     {"user_z", cfg.geometry.user_z}};
    j["channel"] = {{"nlos_paths", cfg.channel.nlos_paths},
                    {"nlos_power_db", cfg.channel.nlos_power_db}};
    j["ao"] = {{"tol", cfg.ao.tol}, {"max_iters", cfg.ao.max_iters}};
    j["pso"] = {{"swarm", cfg.pso.swarm},       {"inertia", cfg.pso.inertia},
                {"c1", cfg.pso.c1},             {"c2", cfg.pso.c2},
                {"iterations", cfg.pso.iterations}, {"batches", cfg.pso.batches},
                {"batch_size", cfg.pso.batch_size}};
    j["sweep"] = {{"elements", cfg.sweep.elements},
                  {"rho_grid", cfg.sweep.rho_grid},
                  {"units_max", cfg.sweep.units_max}};
    return j;
}

inline ScenarioConfig load_config_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw config_error("config: parse error in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

// FNV-1a over the canonical (sorted-key) JSON dump of the config.
inline std::string config_hash(const ScenarioConfig &cfg)
{
    const std::string dump = config_to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace irsim

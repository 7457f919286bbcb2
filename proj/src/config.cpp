// SPDX-License-Identifier: Apache-2.0
//
// rcshp: randomized channel sparsifying hybrid precoding simulator
// Copyright (C) 2026 The rcshp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "rcshp/config.hpp"

#include "json.hpp"

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace rcshp
{

using nlohmann::json;

void PowerModel::validate() const
{
    for (double v : {P_PS, P_LNA, P_RF, P_ADC, xi, varsigma, P_TX})
        if (!(v >= 0.0))
            throw ConfigError("power model: every entry must be non-negative");
}

std::string to_string(ChannelModel m)
{
    return m == ChannelModel::geometry ? "geometry" : "cost2100";
}

std::string to_string(SweepAxis a)
{
    switch (a)
    {
    case SweepAxis::none:
        return "none";
    case SweepAxis::pilots:
        return "pilots";
    case SweepAxis::snr:
        return "snr";
    }
    return "none";
}

SweepAxis sweep_axis_from_string(const std::string &name)
{
    if (name == "none")
        return SweepAxis::none;
    if (name == "pilots")
        return SweepAxis::pilots;
    if (name == "snr")
        return SweepAxis::snr;
    throw ConfigError("unknown sweep axis '" + name + "' (expected none, pilots or snr)");
}

namespace
{

ChannelModel channel_model_from_string(const std::string &name)
{
    if (name == "geometry")
        return ChannelModel::geometry;
    if (name == "cost2100")
        return ChannelModel::cost2100;
    throw ConfigError("unknown channel model '" + name + "' (expected geometry or cost2100)");
}

UtilitySpec::Kind utility_kind_from_string(const std::string &name)
{
    if (name == "sum_rate")
        return UtilitySpec::Kind::sum_rate;
    if (name == "pfs")
        return UtilitySpec::Kind::proportional_fairness;
    if (name == "alpha_fair")
        return UtilitySpec::Kind::alpha_fair;
    throw ConfigError("unknown utility '" + name + "' (expected sum_rate, pfs or alpha_fair)");
}

std::string to_string(ThetaProjection p)
{
    return p == ThetaProjection::box_clip ? "box_clip" : "wrap";
}

ThetaProjection theta_projection_from_string(const std::string &name)
{
    if (name == "box_clip")
        return ThetaProjection::box_clip;
    if (name == "wrap")
        return ThetaProjection::wrap;
    throw ConfigError("unknown theta projection '" + name + "' (expected box_clip or wrap)");
}

std::string backend_name(Backend b)
{
    return b == Backend::serial ? "serial" : "openmp";
}

Backend backend_from_string(const std::string &name)
{
    if (name == "serial")
        return Backend::serial;
    if (name == "openmp")
        return Backend::openmp;
    throw ConfigError("unknown backend '" + name + "' (expected serial or openmp)");
}

json to_json_tree(const ExperimentConfig &c)
{
    json j;
    j["profile"] = c.profile;
    j["dims"] = {{"M", c.dims.M}, {"S", c.dims.S}, {"K", c.dims.K}, {"T_p", c.dims.T_p},
                 {"L", c.dims.L}, {"T", c.dims.T}, {"P_max", c.dims.P_max}};
    j["channel"] = {
        {"model", to_string(c.channel_model)},
        {"geometry",
         {{"n_paths", c.geometry.n_paths},
          {"angular_spread_deg", c.geometry.angular_spread_deg},
          {"gain_db_low", c.geometry.gain_db_low},
          {"gain_db_high", c.geometry.gain_db_high}}},
        {"cost2100",
         {{"n_clusters", c.cost2100.n_clusters},
          {"clusters_per_user", c.cost2100.clusters_per_user},
          {"cluster_width", c.cost2100.cluster_width},
          {"grid_points", c.cost2100.grid_points},
          {"gain_db_low", c.cost2100.gain_db_low},
          {"gain_db_high", c.cost2100.gain_db_high}}}};
    j["utility"] = {{"kind", c.utility.name()}, {"epsilon", c.utility.epsilon}, {"alpha", c.utility.alpha}};
    j["schedule"] = {{"rho_exponent", c.schedule.rho_exponent},
                     {"gamma_exponent", c.schedule.gamma_exponent},
                     {"tau_q", c.schedule.tau_q},
                     {"tau_gamma", c.schedule.tau_gamma}};
    j["optimizer"] = {{"n_iters", c.n_iters},
                      {"batch_size", c.batch_size},
                      {"theta_projection", to_string(c.theta_projection)},
                      {"backend", backend_name(c.backend)},
                      {"mc_every", c.mc_every},
                      {"mc_samples", c.mc_samples}};
    j["sweep"] = {{"axis", to_string(c.sweep_axis)}, {"values", c.sweep_values}};
    j["schemes"] = c.schemes;
    j["seeds"] = {{"stats", c.seeds.stats},
                  {"pilots", c.seeds.pilots},
                  {"optimizer", c.seeds.optimizer},
                  {"evaluation", c.seeds.evaluation}};
    j["evaluation"] = {{"n_eval_samples", c.n_eval_samples},
                       {"n_slots", c.n_slots},
                       {"pilot_overhead", c.pilot_overhead},
                       {"noise_var", c.noise_var}};
    j["power_model"] = {{"P_PS", c.power.P_PS},   {"P_LNA", c.power.P_LNA},
                        {"P_RF", c.power.P_RF},   {"P_ADC", c.power.P_ADC},
                        {"xi", c.power.xi},       {"varsigma", c.power.varsigma},
                        {"ptx_mw_per_unit", c.ptx_mw_per_unit}};
    return j;
}

void reject_unknown(const json &obj, const std::string &where, std::initializer_list<const char *> keys)
{
    if (!obj.is_object())
        throw ConfigError("config: '" + where + "' must be an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto &item : obj.items())
        if (!allowed.contains(item.key()))
            throw ConfigError("config: unknown key '" + where + (where.empty() ? "" : ".") + item.key() + "'");
}

template <class T>
void read(const json &obj, const char *key, T &out)
{
    if (obj.contains(key))
        out = obj.at(key).get<T>();
}

} // namespace

void ExperimentConfig::validate() const
{
    dims.validate();
    if (channel_model == ChannelModel::geometry)
        geometry.validate();
    else
        cost2100.validate();
    utility.validate();
    schedule.validate();
    power.validate();
    if (n_iters < 1 || batch_size < 1)
        throw ConfigError("config: n_iters and batch_size must be >= 1");
    if (mc_every < 0 || mc_samples < 0)
        throw ConfigError("config: mc_every and mc_samples must be >= 0");
    if (n_eval_samples < 1 || n_slots < 1)
        throw ConfigError("config: n_eval_samples and n_slots must be >= 1");
    if (!(noise_var > 0.0))
        throw ConfigError("config: noise_var must be positive");
    if (!(ptx_mw_per_unit >= 0.0))
        throw ConfigError("config: ptx_mw_per_unit must be non-negative");
    if (schemes.empty())
        throw ConfigError("config: at least one scheme is required");
    for (const auto &s : schemes)
        if (s != kSchemeRcshp && s != kSchemePerfect && s != kSchemeDuality && s != kSchemeRzf)
            throw ConfigError("config: unknown scheme '" + s + "'");
    if (sweep_axis == SweepAxis::none && !sweep_values.empty())
        throw ConfigError("config: sweep values given without a sweep axis");
    if (sweep_axis != SweepAxis::none && sweep_values.empty())
        throw ConfigError("config: sweep axis '" + to_string(sweep_axis) + "' needs values");
    for (double v : sweep_values)
    {
        if (sweep_axis == SweepAxis::pilots)
        {
            if (!(v >= 1.0) || v != static_cast<double>(static_cast<int>(v)))
                throw ConfigError("config: pilot sweep values must be positive integers");
            if (v > dims.T)
                throw ConfigError("config: pilot sweep value exceeds the slot length T");
        }
        else if (!std::isfinite(v))
        {
            throw ConfigError("config: SNR sweep values must be finite");
        }
    }
}

ExperimentConfig desk_profile()
{
    return ExperimentConfig{};
}

ExperimentConfig paper_profile()
{
    ExperimentConfig c;
    c.profile = "paper";
    c.dims.M = 64;
    c.dims.S = 8;
    c.dims.K = 8;
    c.dims.T_p = 8;
    c.dims.L = 4;
    c.dims.T = 20;
    c.dims.P_max = 10.0;
    c.n_iters = 100;
    return c;
}

ExperimentConfig profile_by_name(const std::string &name)
{
    if (name == "desk")
        return desk_profile();
    if (name == "paper")
        return paper_profile();
    throw ConfigError("unknown profile '" + name + "' (expected desk or paper)");
}

std::string config_to_json(const ExperimentConfig &cfg, int indent)
{
    return to_json_tree(cfg).dump(indent);
}

ExperimentConfig config_from_json(const std::string &text, const ExperimentConfig &base)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError(std::string("config: ") + e.what());
    }
    ExperimentConfig c = base;
    try
    {
        reject_unknown(j, "", {"profile", "dims", "channel", "utility", "schedule", "optimizer", "sweep",
                               "schemes", "seeds", "evaluation", "power_model"});
        read(j, "profile", c.profile);
        if (j.contains("dims"))
        {
            const json &d = j["dims"];
            reject_unknown(d, "dims", {"M", "S", "K", "T_p", "L", "T", "P_max"});
            read(d, "M", c.dims.M);
            read(d, "S", c.dims.S);
            read(d, "K", c.dims.K);
            read(d, "T_p", c.dims.T_p);
            read(d, "L", c.dims.L);
            read(d, "T", c.dims.T);
            read(d, "P_max", c.dims.P_max);
        }
        if (j.contains("channel"))
        {
            const json &ch = j["channel"];
            reject_unknown(ch, "channel", {"model", "geometry", "cost2100"});
            if (ch.contains("model"))
                c.channel_model = channel_model_from_string(ch["model"].get<std::string>());
            if (ch.contains("geometry"))
            {
                const json &g = ch["geometry"];
                reject_unknown(g, "channel.geometry", {"n_paths", "angular_spread_deg", "gain_db_low", "gain_db_high"});
                read(g, "n_paths", c.geometry.n_paths);
                read(g, "angular_spread_deg", c.geometry.angular_spread_deg);
                read(g, "gain_db_low", c.geometry.gain_db_low);
                read(g, "gain_db_high", c.geometry.gain_db_high);
            }
            if (ch.contains("cost2100"))
            {
                const json &g = ch["cost2100"];
                reject_unknown(g, "channel.cost2100", {"n_clusters", "clusters_per_user", "cluster_width",
                                                       "grid_points", "gain_db_low", "gain_db_high"});
                read(g, "n_clusters", c.cost2100.n_clusters);
                read(g, "clusters_per_user", c.cost2100.clusters_per_user);
                read(g, "cluster_width", c.cost2100.cluster_width);
                read(g, "grid_points", c.cost2100.grid_points);
                read(g, "gain_db_low", c.cost2100.gain_db_low);
                read(g, "gain_db_high", c.cost2100.gain_db_high);
            }
        }
        if (j.contains("utility"))
        {
            const json &u = j["utility"];
            reject_unknown(u, "utility", {"kind", "epsilon", "alpha"});
            if (u.contains("kind"))
                c.utility.kind = utility_kind_from_string(u["kind"].get<std::string>());
            read(u, "epsilon", c.utility.epsilon);
            read(u, "alpha", c.utility.alpha);
        }
        if (j.contains("schedule"))
        {
            const json &s = j["schedule"];
            reject_unknown(s, "schedule", {"rho_exponent", "gamma_exponent", "tau_q", "tau_gamma"});
            read(s, "rho_exponent", c.schedule.rho_exponent);
            read(s, "gamma_exponent", c.schedule.gamma_exponent);
            read(s, "tau_q", c.schedule.tau_q);
            read(s, "tau_gamma", c.schedule.tau_gamma);
        }
        if (j.contains("optimizer"))
        {
            const json &o = j["optimizer"];
            reject_unknown(o, "optimizer",
                           {"n_iters", "batch_size", "theta_projection", "backend", "mc_every", "mc_samples"});
            read(o, "n_iters", c.n_iters);
            read(o, "batch_size", c.batch_size);
            if (o.contains("theta_projection"))
                c.theta_projection = theta_projection_from_string(o["theta_projection"].get<std::string>());
            if (o.contains("backend"))
                c.backend = backend_from_string(o["backend"].get<std::string>());
            read(o, "mc_every", c.mc_every);
            read(o, "mc_samples", c.mc_samples);
        }
        if (j.contains("sweep"))
        {
            const json &s = j["sweep"];
            reject_unknown(s, "sweep", {"axis", "values"});
            if (s.contains("axis"))
                c.sweep_axis = sweep_axis_from_string(s["axis"].get<std::string>());
            read(s, "values", c.sweep_values);
        }
        read(j, "schemes", c.schemes);
        if (j.contains("seeds"))
        {
            const json &s = j["seeds"];
            reject_unknown(s, "seeds", {"stats", "pilots", "optimizer", "evaluation"});
            read(s, "stats", c.seeds.stats);
            read(s, "pilots", c.seeds.pilots);
            read(s, "optimizer", c.seeds.optimizer);
            read(s, "evaluation", c.seeds.evaluation);
        }
        if (j.contains("evaluation"))
        {
            const json &e = j["evaluation"];
            reject_unknown(e, "evaluation", {"n_eval_samples", "n_slots", "pilot_overhead", "noise_var"});
            read(e, "n_eval_samples", c.n_eval_samples);
            read(e, "n_slots", c.n_slots);
            read(e, "pilot_overhead", c.pilot_overhead);
            read(e, "noise_var", c.noise_var);
        }
        if (j.contains("power_model"))
        {
            const json &p = j["power_model"];
            reject_unknown(p, "power_model", {"P_PS", "P_LNA", "P_RF", "P_ADC", "xi", "varsigma", "ptx_mw_per_unit"});
            read(p, "P_PS", c.power.P_PS);
            read(p, "P_LNA", c.power.P_LNA);
            read(p, "P_RF", c.power.P_RF);
            read(p, "P_ADC", c.power.P_ADC);
            read(p, "xi", c.power.xi);
            read(p, "varsigma", c.power.varsigma);
            read(p, "ptx_mw_per_unit", c.ptx_mw_per_unit);
        }
    }
    catch (const json::exception &e)
    {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path &path, const std::string &profile_override)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::string profile = "desk";
    try
    {
        const json j = json::parse(text);
        if (j.is_object() && j.contains("profile"))
            profile = j["profile"].get<std::string>();
    }
    catch (const json::exception &e)
    {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
    if (!profile_override.empty())
        profile = profile_override;

    ExperimentConfig cfg = config_from_json(text, profile_by_name(profile));
    cfg.profile = profile;
    cfg.validate();
    return cfg;
}

std::string config_hash(const ExperimentConfig &cfg)
{
    const std::string text = to_json_tree(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text)
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

} // namespace rcshp

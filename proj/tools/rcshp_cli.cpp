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

// Command-line front end: experiment sweeps, gradient check, convergence
// traces and the reference configuration.

#include "rcshp/config.hpp"
#include "rcshp/harness.hpp"
#include "rcshp/jacobian.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace rcshp;

namespace
{

ExperimentConfig config_or_profile(const std::string &path, const std::string &profile)
{
    if (!path.empty())
        return load_config(path, profile);
    ExperimentConfig cfg = profile_by_name(profile.empty() ? "desk" : profile);
    cfg.validate();
    return cfg;
}

std::vector<double> default_sweep(const ExperimentConfig &cfg, SweepAxis axis)
{
    std::vector<double> v;
    if (axis == SweepAxis::pilots)
    {
        for (int t = 2; t <= std::min(2 * cfg.dims.S, cfg.dims.T); ++t)
            v.push_back(t);
    }
    else if (axis == SweepAxis::snr)
    {
        v = {0.0, 5.0, 10.0, 15.0, 20.0};
    }
    return v;
}

std::string scheme_from_flag(const std::string &s)
{
    if (s == "rcshp")
        return kSchemeRcshp;
    if (s == "rzf")
        return kSchemeRzf;
    if (s == "perfect")
        return kSchemePerfect;
    if (s == "duality")
        return kSchemeDuality;
    throw ConfigError("unknown scheme '" + s + "'");
}

int cmd_run(const std::string &config, const std::string &profile, const std::string &out_dir,
            const std::vector<std::string> &schemes, const std::string &sweep, std::int64_t seed)
{
    ExperimentConfig cfg = config_or_profile(config, profile);
    if (!schemes.empty())
    {
        cfg.schemes.clear();
        for (const auto &s : schemes)
            cfg.schemes.push_back(scheme_from_flag(s));
    }
    if (!sweep.empty())
    {
        const SweepAxis axis = sweep_axis_from_string(sweep);
        if (axis != cfg.sweep_axis || cfg.sweep_values.empty())
            cfg.sweep_values = default_sweep(cfg, axis);
        cfg.sweep_axis = axis;
    }
    if (seed >= 0)
    {
        const auto s = static_cast<std::uint64_t>(seed);
        cfg.seeds = {s, s, s, s};
    }
    cfg.validate();

    fs::create_directories(out_dir);
    const ExperimentResult res = run_experiment(cfg, [](const std::string &msg) { std::cerr << msg << '\n'; });

    const fs::path dir(out_dir);
    {
        std::ofstream c(dir / "config.json");
        c << config_to_json(cfg) << '\n';
    }
    write_csv(res.records, cfg.dims.K, dir / "results.csv");
    write_json(res.records, cfg, dir / "results.json");
    for (std::size_t i = 0; i < res.records.size(); ++i)
        if (!res.records[i].trace_file.empty())
            write_trace_csv(res.traces[i], dir / res.records[i].trace_file);

    int errors = 0;
    for (const auto &r : res.records)
        errors += r.status == "ok" ? 0 : 1;
    std::cout << "wrote " << res.records.size() << " records to " << (dir / "results.csv").string() << '\n';
    return errors == 0 ? 0 : 3;
}

int cmd_gradcheck(int instances, std::int64_t seed)
{
    const GradcheckReport rep = gradcheck(instances, static_cast<std::uint64_t>(seed));
    std::printf("gradcheck: %d instances, max relative error %.3e, max absolute error (near-zero) %.3e, "
                "%d failing\n",
                rep.instances, rep.max_rel_error, rep.max_abs_error, rep.failures);
    return rep.passed() ? 0 : 1;
}

int cmd_convergence(const std::string &config, const std::string &profile, const std::string &out,
                    bool perfect)
{
    const ExperimentConfig cfg = config_or_profile(config, profile);
    const OptimizerTrace trace = run_convergence(cfg, perfect ? CsiMode::perfect : CsiMode::estimated);
    const fs::path path(out);
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    write_trace_csv(trace, path);
    const TraceRecord &last = trace.records.back();
    std::printf("%zu iterations, final surrogate utility %.6f, trace in %s\n", trace.records.size(),
                last.surrogate_utility, path.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"rcshp: randomized channel sparsifying hybrid precoding simulator"};
    app.require_subcommand(1);

    std::string config, profile, out_dir = "out", sweep;
    std::vector<std::string> schemes;
    std::int64_t seed = -1;
    auto *run = app.add_subcommand("run", "run an experiment sweep and write CSV/JSON results");
    run->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory")->capture_default_str();
    run->add_option("--profile", profile, "base defaults")->check(CLI::IsMember({"desk", "paper"}));
    run->add_option("--scheme", schemes, "restrict to these schemes (repeatable)")
        ->check(CLI::IsMember({"rcshp", "rzf", "perfect", "duality"}));
    run->add_option("--sweep", sweep, "sweep axis")->check(CLI::IsMember({"pilots", "snr", "none"}));
    run->add_option("--seed", seed, "set every seed stream to N")->check(CLI::NonNegativeNumber);

    int instances = 50;
    std::int64_t gc_seed = 7;
    auto *gc = app.add_subcommand("gradcheck", "compare analytic rate gradients with finite differences");
    gc->add_option("--instances", instances, "random instances")->capture_default_str();
    gc->add_option("--seed", gc_seed, "seed")->capture_default_str();

    std::string conv_config, conv_profile, conv_out = "trace.csv";
    bool perfect = false;
    auto *conv = app.add_subcommand("convergence", "run the optimizer once and write its trace CSV");
    conv->add_option("--config", conv_config, "JSON config file")->check(CLI::ExistingFile);
    conv->add_option("--profile", conv_profile, "base defaults")->check(CLI::IsMember({"desk", "paper"}));
    conv->add_option("--out", conv_out, "trace CSV path")->capture_default_str();
    conv->add_flag("--perfect-csi", perfect, "optimize on the true effective channel");

    std::string dc_profile = "desk";
    auto *dc = app.add_subcommand("default-config", "print the reference config with every default");
    dc->add_option("--profile", dc_profile, "base defaults")->check(CLI::IsMember({"desk", "paper"}));

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
            return cmd_run(config, profile, out_dir, schemes, sweep, seed);
        if (*gc)
            return cmd_gradcheck(instances, gc_seed);
        if (*conv)
            return cmd_convergence(conv_config, conv_profile, conv_out, perfect);
        if (*dc)
        {
            std::cout << config_to_json(profile_by_name(dc_profile)) << '\n';
            return 0;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "rcshp: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

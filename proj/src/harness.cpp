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

#include "rcshp/harness.hpp"
#include "rcshp/kernels.hpp"
#include "rcshp/pipeline.hpp"
#include "rcshp/random.hpp"
#include "rcshp/rate_utility.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace rcshp
{

using nlohmann::json;

double total_power_mw(const SystemDims &dims, const PowerModel &pm)
{
    pm.validate();
    const double M = dims.M;
    const double S = dims.S;
    const double p_bb = S * pm.xi + pm.varsigma;
    return M * S * pm.P_PS + S * (pm.P_LNA + pm.P_RF + pm.P_ADC) + p_bb + pm.P_TX;
}

double energy_efficiency(double sum_rate, const SystemDims &dims, const PowerModel &pm)
{
    if (!(sum_rate >= 0.0))
        throw DataError("energy_efficiency: sum rate must be non-negative");
    const double watts = total_power_mw(dims, pm) / 1000.0;
    if (!(watts > 0.0))
        throw DataError("energy_efficiency: total power must be positive");
    return sum_rate / watts;
}

namespace
{

double uniform01(Rng &rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int draw_state(Rng &rng, const RVec &q)
{
    const double u = uniform01(rng);
    double acc = 0.0;
    int last = 0;
    for (Eigen::Index l = 0; l < q.size(); ++l)
    {
        if (q(l) <= 0.0)
            continue;
        acc += q(l);
        last = static_cast<int>(l);
        if (u < acc)
            return last;
    }
    return last;
}

std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double mean_of(const RVec &v)
{
    return v.sum() / static_cast<double>(v.size());
}

double standard_error(const RVec &v)
{
    const Eigen::Index n = v.size();
    if (n < 2)
        return 0.0;
    const double m = mean_of(v);
    return std::sqrt((v.array() - m).square().sum() / static_cast<double>(n - 1) / static_cast<double>(n));
}

std::vector<ChannelSample> draw_samples(const ChannelStats &stats, int count, std::uint64_t seed,
                                        double noise_var)
{
    std::vector<ChannelSample> s = sample_channels(stats, count, seed);
    if (noise_var != 1.0)
        for (auto &x : s)
            x.N *= std::sqrt(noise_var);
    return s;
}

} // namespace

SlotLog apply_policy(const ControlPolicy &policy, const ChannelStats &stats, const PilotMatrix &pilots,
                     int n_slots, std::uint64_t seed, CsiMode csi_mode)
{
    if (n_slots < 1)
        throw ConfigError("apply_policy: n_slots must be >= 1");
    policy.check_feasible(stats.dims.P_max);
    const int L = policy.L();
    std::vector<StateContext> ctx;
    ctx.reserve(L);
    for (int l = 0; l < L; ++l)
        ctx.push_back(make_state_context(policy.states[l], stats, pilots, csi_mode));

    Rng rng(derive_seed(seed, 0x51));
    const ChannelSampler sampler(stats);
    const std::uint64_t sample_seed = derive_seed(seed, 0x52);
    SlotLog log;
    log.states.resize(n_slots);
    log.slot_rates.resize(stats.dims.K, n_slots);
    log.state_frequencies = RVec::Zero(L);
    for (int t = 0; t < n_slots; ++t)
    {
        const int l = draw_state(rng, policy.q);
        log.states[t] = l;
        log.state_frequencies(l) += 1.0;
        log.slot_rates.col(t) = run_pipeline(ctx[l], sampler.draw(sample_seed, t)).rates;
    }
    log.state_frequencies /= static_cast<double>(n_slots);
    log.mean_rates = log.slot_rates.rowwise().mean();
    return log;
}

ControlPolicy equal_power_policy(const SystemDims &dims, const RVec &theta)
{
    ControlPolicy p;
    p.states.push_back({theta, RVec::Constant(dims.K, dims.P_max / dims.K)});
    p.q = RVec::Ones(1);
    return p;
}

RVec dft_beam_phases(const CMat &covariance, int S)
{
    const int M = static_cast<int>(covariance.rows());
    if (S > M)
        throw ConfigError("dft_beam_phases: S exceeds M");
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> energy(M);
    for (int n = 0; n < M; ++n)
    {
        CVec a(M);
        for (int m = 0; m < M; ++m)
            a(m) = std::polar(1.0, two_pi * ((m * n) % M) / M);
        energy[n] = (a.adjoint() * covariance * a)(0, 0).real();
    }
    std::vector<int> order(M);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return energy[a] > energy[b]; });
    RVec theta(static_cast<Eigen::Index>(M) * S);
    for (int j = 0; j < S; ++j)
        for (int m = 0; m < M; ++m)
            theta(j * M + m) = two_pi * ((m * order[j]) % M) / M;
    return theta;
}

RateVector rzf_average_rates(const RVec &theta, const ChannelStats &stats, const PilotMatrix &pilots,
                             const std::vector<ChannelSample> &samples, CsiMode csi_mode, RVec *per_sample_sum)
{
    const SystemDims &d = stats.dims;
    const ControlPolicy pol = equal_power_policy(d, theta);
    const StateContext ctx = make_state_context(pol.states[0], stats, pilots, csi_mode);
    const RVec &p = pol.states[0].power;
    const double alpha = d.K / d.P_max;
    const auto n = static_cast<Eigen::Index>(samples.size());
    RMat rates(d.K, n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const PipelineState st = run_pipeline(ctx, samples[i]);
        const DigitalPrecoder g = rzf_digital_precoder(st.H_hat, alpha, ctx.F);
        const CMat U = st.H_eff * g.G;
        for (int k = 0; k < d.K; ++k)
        {
            double interference = 1.0;
            for (int j = 0; j < d.K; ++j)
                if (j != k)
                    interference += p(j) * std::norm(U(k, j));
            rates(k, i) = std::log2(1.0 + p(k) * std::norm(U(k, k)) / interference);
        }
    }
    if (per_sample_sum)
        *per_sample_sum = rates.colwise().sum().transpose();
    return rates.rowwise().mean();
}

ChannelStats build_stats(const ExperimentConfig &cfg)
{
    if (cfg.channel_model == ChannelModel::geometry)
        return build_geometry_stats(cfg.dims, cfg.geometry, cfg.seeds.stats);
    return build_cost2100_stats(cfg.dims, cfg.cost2100, cfg.seeds.stats);
}

SystemDims dims_at(const ExperimentConfig &cfg, double sweep_value)
{
    SystemDims d = cfg.dims;
    if (cfg.sweep_axis == SweepAxis::pilots)
        d.T_p = static_cast<int>(sweep_value);
    else if (cfg.sweep_axis == SweepAxis::snr)
        d.P_max = std::pow(10.0, sweep_value / 10.0) * cfg.noise_var;
    d.validate();
    return d;
}

namespace
{

SscaOptions optimizer_options(const ExperimentConfig &cfg, CsiMode mode)
{
    SscaOptions o;
    o.n_iters = cfg.n_iters;
    o.batch_size = cfg.batch_size;
    o.seed = cfg.seeds.optimizer;
    o.csi_mode = mode;
    o.theta_projection = cfg.theta_projection;
    o.backend = cfg.backend;
    o.mc_every = cfg.mc_every;
    o.mc_samples = cfg.mc_samples;
    o.mc_seed = derive_seed(cfg.seeds.evaluation, 0x40c);
    return o;
}

std::string value_tag(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct PointContext
{
    const ExperimentConfig &cfg;
    ChannelStats stats;
    PilotMatrix pilots;
    std::vector<ChannelSample> eval;
    CMat cov_sum;
};

void finish_record(ExperimentRecord &rec, const RateVector &raw_rates, const RVec &per_sample_sum,
                   const PointContext &pc)
{
    const SystemDims &d = pc.stats.dims;
    const double scale = pc.cfg.pilot_overhead ? static_cast<double>(d.T - d.T_p) / d.T : 1.0;
    rec.user_rates = raw_rates * scale;
    rec.sum_rate = rec.user_rates.sum();
    rec.sum_rate_se = standard_error(per_sample_sum) * scale;
    rec.sum_rate_net = raw_rates.sum() * static_cast<double>(d.T - d.T_p) / d.T;
    rec.utility = utility_value(rec.user_rates, pc.cfg.utility);
    PowerModel pm = pc.cfg.power;
    pm.P_TX = d.P_max * pc.cfg.ptx_mw_per_unit;
    rec.ee = energy_efficiency(rec.sum_rate, d, pm);
}

void run_scheme(const std::string &scheme, const PointContext &pc, ExperimentRecord &rec,
                OptimizerTrace &trace)
{
    const ExperimentConfig &cfg = pc.cfg;
    const SystemDims &d = pc.stats.dims;
    const double scale = cfg.pilot_overhead ? static_cast<double>(d.T - d.T_p) / d.T : 1.0;

    if (scheme == kSchemeRcshp || scheme == kSchemePerfect)
    {
        const CsiMode mode = scheme == kSchemeRcshp ? CsiMode::estimated : CsiMode::perfect;
        const ControlPolicy init = initialize_policy(d, pc.stats, cfg.seeds.optimizer);
        SscaResult res = ssca_optimize(pc.stats, pc.pilots, cfg.utility, cfg.schedule, init,
                                       optimizer_options(cfg, mode));
        const RateVector r = monte_carlo_average_rates(res.policy, pc.stats, pc.pilots, pc.eval, mode, cfg.backend);
        const RVec per = per_sample_sum_rates(res.policy, pc.stats, pc.pilots, pc.eval, mode, cfg.backend);
        finish_record(rec, r, per, pc);
        const SlotLog slots =
            apply_policy(res.policy, pc.stats, pc.pilots, cfg.n_slots, derive_seed(cfg.seeds.evaluation, 0x5107), mode);
        rec.slot_sum_rate = slots.mean_rates.sum() * scale;
        rec.trace_file = "trace_" + rec.sweep_axis + "_" + value_tag(rec.sweep_value) + "_" + scheme + ".csv";
        trace = std::move(res.trace);
        return;
    }

    if (scheme == kSchemeDuality)
    {
        const ControlPolicy pol = equal_power_policy(d, eigen_phases(pc.cov_sum, d.S));
        const RateVector r = monte_carlo_average_rates(pol, pc.stats, pc.pilots, pc.eval, CsiMode::estimated, cfg.backend);
        const RVec per = per_sample_sum_rates(pol, pc.stats, pc.pilots, pc.eval, CsiMode::estimated, cfg.backend);
        finish_record(rec, r, per, pc);
        const SlotLog slots =
            apply_policy(pol, pc.stats, pc.pilots, cfg.n_slots, derive_seed(cfg.seeds.evaluation, 0x5107));
        rec.slot_sum_rate = slots.mean_rates.sum() * scale;
        return;
    }

    if (scheme == kSchemeRzf)
    {
        RVec per;
        const RateVector r = rzf_average_rates(dft_beam_phases(pc.cov_sum, d.S), pc.stats, pc.pilots, pc.eval,
                                               CsiMode::estimated, &per);
        finish_record(rec, r, per, pc);
        rec.slot_sum_rate = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    throw ConfigError("unknown scheme '" + scheme + "'");
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig &cfg, const LogFn &log)
{
    cfg.validate();
    const std::string hash = config_hash(cfg);
    const ChannelStats base_stats = build_stats(cfg);
    CMat cov_sum = CMat::Zero(cfg.dims.M, cfg.dims.M);
    for (const auto &c : base_stats.covariances)
        cov_sum += c;

    std::vector<double> points = cfg.sweep_values;
    if (cfg.sweep_axis == SweepAxis::none)
        points = {0.0};

    ExperimentResult out;
    for (double value : points)
    {
        std::vector<ExperimentRecord> pending;
        PointContext pc{cfg, base_stats, {}, {}, cov_sum};
        std::string point_error;
        try
        {
            pc.stats.dims = dims_at(cfg, value);
            pc.pilots = generate_pilots(pc.stats.dims.T_p, pc.stats.dims.S, pc.stats.dims.P_max, cfg.seeds.pilots);
            pc.eval = draw_samples(pc.stats, cfg.n_eval_samples, derive_seed(cfg.seeds.evaluation, 0xe7a1),
                                   cfg.noise_var);
        }
        catch (const std::exception &e)
        {
            point_error = e.what();
        }

        for (const auto &scheme : cfg.schemes)
        {
            ExperimentRecord rec;
            rec.config_hash = hash;
            rec.sweep_axis = to_string(cfg.sweep_axis);
            rec.sweep_value = value;
            rec.scheme = scheme;
            rec.seed = cfg.seeds.optimizer;
            OptimizerTrace trace;
            const auto t0 = std::chrono::steady_clock::now();
            try
            {
                if (!point_error.empty())
                    throw NumericalError(point_error);
                run_scheme(scheme, pc, rec, trace);
            }
            catch (const std::exception &e)
            {
                const double nan = std::numeric_limits<double>::quiet_NaN();
                rec.status = std::string("error: ") + e.what();
                rec.utility = rec.sum_rate = rec.sum_rate_se = rec.sum_rate_net = rec.ee = rec.slot_sum_rate = nan;
                rec.user_rates = RVec::Constant(cfg.dims.K, nan);
                rec.trace_file.clear();
                trace = {};
            }
            rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (log)
                log(rec.sweep_axis + "=" + value_tag(value) + " " + scheme + ": " +
                    (rec.status == "ok" ? "utility " + fmt(rec.utility) + ", sum rate " + fmt(rec.sum_rate)
                                        : rec.status));
            out.records.push_back(std::move(rec));
            out.traces.push_back(std::move(trace));
        }
    }
    return out;
}

OptimizerTrace run_convergence(const ExperimentConfig &cfg, CsiMode csi_mode)
{
    cfg.validate();
    ChannelStats stats = build_stats(cfg);
    const double base = cfg.sweep_axis == SweepAxis::pilots ? cfg.dims.T_p
                        : cfg.sweep_axis == SweepAxis::snr  ? 10.0 * std::log10(cfg.dims.P_max / cfg.noise_var)
                                                            : 0.0;
    stats.dims = dims_at(cfg, base);
    const PilotMatrix pilots = generate_pilots(stats.dims.T_p, stats.dims.S, stats.dims.P_max, cfg.seeds.pilots);
    const ControlPolicy init = initialize_policy(stats.dims, stats, cfg.seeds.optimizer);
    return ssca_optimize(stats, pilots, cfg.utility, cfg.schedule, init, optimizer_options(cfg, csi_mode)).trace;
}

std::string csv_header(int K)
{
    std::string h = "sweep_axis,sweep_value,scheme,seed,utility,sum_rate,ee,sum_rate_se,sum_rate_net,status";
    for (int k = 1; k <= K; ++k)
        h += ",user_rate_" + std::to_string(k);
    return h;
}

namespace
{

std::ofstream open_out(const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

void check_written(std::ofstream &out, const std::filesystem::path &path)
{
    out.flush();
    if (!out)
        throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s)
    {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + "\"";
}

json num(double v)
{
    return std::isnan(v) ? json(nullptr) : json(v);
}

double num_from(const json &j)
{
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

} // namespace

void write_csv(const std::vector<ExperimentRecord> &records, int K, const std::filesystem::path &path)
{
    std::ofstream out = open_out(path);
    out << csv_header(K) << '\n';
    for (const auto &r : records)
    {
        if (r.user_rates.size() != K)
            throw DataError("write_csv: record has " + std::to_string(r.user_rates.size()) + " user rates, expected " +
                            std::to_string(K));
        out << r.sweep_axis << ',' << fmt(r.sweep_value) << ',' << r.scheme << ',' << r.seed << ','
            << fmt(r.utility) << ',' << fmt(r.sum_rate) << ',' << fmt(r.ee) << ',' << fmt(r.sum_rate_se) << ','
            << fmt(r.sum_rate_net) << ',' << csv_field(r.status);
        for (int k = 0; k < K; ++k)
            out << ',' << fmt(r.user_rates(k));
        out << '\n';
    }
    check_written(out, path);
}

void write_json(const std::vector<ExperimentRecord> &records, const ExperimentConfig &cfg,
                const std::filesystem::path &path)
{
    json j;
    j["config_hash"] = config_hash(cfg);
    j["config"] = json::parse(config_to_json(cfg));
    j["metadata"] = {{"ptx_mapping", "P_TX[mW] = P_max * ptx_mw_per_unit"},
                     {"ptx_mw_per_unit", cfg.ptx_mw_per_unit},
                     {"rate_unit", "bit/s/Hz"},
                     {"rates_overhead_scaled", cfg.pilot_overhead},
                     {"ee_unit", "bit/s/Hz/W"}};
    json recs = json::array();
    for (const auto &r : records)
    {
        json u = json::array();
        for (Eigen::Index k = 0; k < r.user_rates.size(); ++k)
            u.push_back(num(r.user_rates(k)));
        recs.push_back({{"config_hash", r.config_hash},
                        {"sweep_axis", r.sweep_axis},
                        {"sweep_value", num(r.sweep_value)},
                        {"scheme", r.scheme},
                        {"seed", r.seed},
                        {"utility", num(r.utility)},
                        {"sum_rate", num(r.sum_rate)},
                        {"sum_rate_se", num(r.sum_rate_se)},
                        {"sum_rate_net", num(r.sum_rate_net)},
                        {"ee", num(r.ee)},
                        {"slot_sum_rate", num(r.slot_sum_rate)},
                        {"status", r.status},
                        {"trace_file", r.trace_file},
                        {"wall_time_s", r.wall_time_s},
                        {"user_rates", u}});
    }
    j["records"] = recs;
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
    check_written(out, path);
}

std::vector<ExperimentRecord> read_json_records(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    std::vector<ExperimentRecord> out;
    try
    {
        const json j = json::parse(in);
        for (const auto &r : j.at("records"))
        {
            ExperimentRecord rec;
            rec.config_hash = r.at("config_hash").get<std::string>();
            rec.sweep_axis = r.at("sweep_axis").get<std::string>();
            rec.sweep_value = num_from(r.at("sweep_value"));
            rec.scheme = r.at("scheme").get<std::string>();
            rec.seed = r.at("seed").get<std::uint64_t>();
            rec.utility = num_from(r.at("utility"));
            rec.sum_rate = num_from(r.at("sum_rate"));
            rec.sum_rate_se = num_from(r.at("sum_rate_se"));
            rec.sum_rate_net = num_from(r.at("sum_rate_net"));
            rec.ee = num_from(r.at("ee"));
            rec.slot_sum_rate = num_from(r.at("slot_sum_rate"));
            rec.status = r.at("status").get<std::string>();
            rec.trace_file = r.at("trace_file").get<std::string>();
            rec.wall_time_s = r.at("wall_time_s").get<double>();
            const json &u = r.at("user_rates");
            rec.user_rates.resize(static_cast<Eigen::Index>(u.size()));
            for (std::size_t k = 0; k < u.size(); ++k)
                rec.user_rates(static_cast<Eigen::Index>(k)) = num_from(u[k]);
            out.push_back(std::move(rec));
        }
    }
    catch (const json::exception &e)
    {
        throw DataError("'" + path.string() + "': " + e.what());
    }
    return out;
}

void write_trace_csv(const OptimizerTrace &trace, const std::filesystem::path &path)
{
    std::ofstream out = open_out(path);
    out << "iter,surrogate_utility,mc_utility,step_norm_gamma,step_norm_q\n";
    for (const auto &r : trace.records)
        out << r.iter << ',' << fmt(r.surrogate_utility) << ',' << fmt(r.mc_utility) << ','
            << fmt(r.step_norm_gamma) << ',' << fmt(r.step_norm_q) << '\n';
    check_written(out, path);
}

} // namespace rcshp

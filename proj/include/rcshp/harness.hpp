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

#ifndef RCSHP_HARNESS_HPP
#define RCSHP_HARNESS_HPP

#include "rcshp/channel.hpp"
#include "rcshp/config.hpp"
#include "rcshp/estimation.hpp"
#include "rcshp/precoding.hpp"
#include "rcshp/ssca.hpp"
#include "rcshp/types.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace rcshp
{

/// M S P_PS + S (P_LNA + P_RF + P_ADC) + S xi + varsigma + P_TX, in mW.
double total_power_mw(const SystemDims &dims, const PowerModel &pm);

/// Sum rate per watt of total consumed power.
double energy_efficiency(double sum_rate, const SystemDims &dims, const PowerModel &pm);

struct SlotLog
{
    RateVector mean_rates;       ///< empirical average over slots
    std::vector<int> states;     ///< state index used in each slot
    RMat slot_rates;             ///< K x n_slots
    RVec state_frequencies;      ///< empirical frequency of each state
};

/// Time-shares the states of a policy over n_slots slots: state l is drawn
/// with probability q_l, then a fresh realization is estimated, precoded
/// and scored.
SlotLog apply_policy(const ControlPolicy &policy, const ChannelStats &stats, const PilotMatrix &pilots,
                     int n_slots, std::uint64_t seed, CsiMode csi_mode = CsiMode::estimated);

/// Single-state policy with p = P_max / K for every user.
ControlPolicy equal_power_policy(const SystemDims &dims, const RVec &theta);

/// Phases of the S DFT beams carrying the most energy of `covariance`.
RVec dft_beam_phases(const CMat &covariance, int S);

/// Average rates of equal-power RZF (alpha = K / P_max) behind the given
/// analog precoder, on the estimated effective channel.
RateVector rzf_average_rates(const RVec &theta, const ChannelStats &stats, const PilotMatrix &pilots,
                             const std::vector<ChannelSample> &samples, CsiMode csi_mode,
                             RVec *per_sample_sum = nullptr);

struct ExperimentRecord
{
    std::string config_hash;
    std::string sweep_axis;
    double sweep_value = 0.0;
    std::string scheme;
    std::uint64_t seed = 0;
    double utility = 0.0;
    double sum_rate = 0.0;
    double sum_rate_se = 0.0;
    double sum_rate_net = 0.0; ///< raw sum rate times (T - T_p) / T
    double ee = 0.0;
    double slot_sum_rate = 0.0;
    std::string status = "ok";
    std::string trace_file; ///< empty for schemes without an optimizer run
    double wall_time_s = 0.0;
    RateVector user_rates;
};

struct ExperimentResult
{
    std::vector<ExperimentRecord> records;
    /// One trace per record; empty for baselines.
    std::vector<OptimizerTrace> traces;
};

using LogFn = std::function<void(const std::string &)>;

ChannelStats build_stats(const ExperimentConfig &cfg);

/// Dimensions in force at one sweep point.
SystemDims dims_at(const ExperimentConfig &cfg, double sweep_value);

ExperimentResult run_experiment(const ExperimentConfig &cfg, const LogFn &log = {});

/// Runs the optimizer on the base point of a config and returns its trace.
OptimizerTrace run_convergence(const ExperimentConfig &cfg, CsiMode csi_mode = CsiMode::estimated);

std::string csv_header(int K);
void write_csv(const std::vector<ExperimentRecord> &records, int K, const std::filesystem::path &path);
void write_json(const std::vector<ExperimentRecord> &records, const ExperimentConfig &cfg,
                const std::filesystem::path &path);
std::vector<ExperimentRecord> read_json_records(const std::filesystem::path &path);
void write_trace_csv(const OptimizerTrace &trace, const std::filesystem::path &path);

} // namespace rcshp

#endif

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

#ifndef RCSHP_CONFIG_HPP
#define RCSHP_CONFIG_HPP

#include "rcshp/channel.hpp"
#include "rcshp/rate_utility.hpp"
#include "rcshp/ssca.hpp"
#include "rcshp/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rcshp
{

/// Base-station power consumption model, all values in mW.
struct PowerModel
{
    double P_PS = 6.6;
    double P_LNA = 20.0;
    double P_RF = 120.0;
    double P_ADC = 240.0;
    double xi = 10.0;
    double varsigma = 136.0;
    double P_TX = 0.0;

    void validate() const;
};

enum class ChannelModel
{
    geometry,
    cost2100
};

enum class SweepAxis
{
    none,
    pilots, ///< values are T_p
    snr     ///< values in dB, P_max = 10^(snr/10) with unit noise power
};

std::string to_string(ChannelModel m);
std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string &name);

struct SeedConfig
{
    std::uint64_t stats = 1;
    std::uint64_t pilots = 2;
    std::uint64_t optimizer = 3;
    std::uint64_t evaluation = 4;
};

/// Scheme names accepted in ExperimentConfig::schemes.
inline constexpr const char *kSchemeRcshp = "rcshp";
inline constexpr const char *kSchemePerfect = "perfect_csi_rcshp";
inline constexpr const char *kSchemeDuality = "duality_equal_power";
inline constexpr const char *kSchemeRzf = "rzf_equal_power";

struct ExperimentConfig
{
    std::string profile = "desk";
    SystemDims dims;
    ChannelModel channel_model = ChannelModel::geometry;
    GeometryModelParams geometry;
    Cost2100ModelParams cost2100;
    UtilitySpec utility;
    StepSchedule schedule;

    int n_iters = 50;
    int batch_size = 9;
    ThetaProjection theta_projection = ThetaProjection::box_clip;
    Backend backend = Backend::openmp;
    int mc_every = 10;
    int mc_samples = 200;

    SweepAxis sweep_axis = SweepAxis::none;
    std::vector<double> sweep_values;
    std::vector<std::string> schemes{kSchemeRcshp, kSchemePerfect, kSchemeDuality, kSchemeRzf};
    SeedConfig seeds;
    int n_eval_samples = 2000;
    int n_slots = 200;
    bool pilot_overhead = false;
    double noise_var = 1.0;

    PowerModel power;
    double ptx_mw_per_unit = 1.0; ///< P_TX = P_max * ptx_mw_per_unit

    void validate() const;
};

/// Desk-scale defaults (M=16, S=4, K=4, L=2).
ExperimentConfig desk_profile();
/// Large-array defaults (M=64, S=8, K=8, L=4, 100 iterations, 10 dB).
ExperimentConfig paper_profile();
ExperimentConfig profile_by_name(const std::string &name);

/// Canonical JSON text with every field present.
std::string config_to_json(const ExperimentConfig &cfg, int indent = 2);

/// Overlays the keys present in `text` on top of `base`. Unknown keys are
/// rejected so that typos do not silently fall back to defaults.
ExperimentConfig config_from_json(const std::string &text, const ExperimentConfig &base);

/// Reads a JSON config file. The "profile" key, when present, selects the
/// base defaults; `profile_override` (if non-empty) takes precedence.
ExperimentConfig load_config(const std::filesystem::path &path, const std::string &profile_override = "");

/// 16 hex digits of FNV-1a over the canonical compact JSON.
std::string config_hash(const ExperimentConfig &cfg);

} // namespace rcshp

#endif

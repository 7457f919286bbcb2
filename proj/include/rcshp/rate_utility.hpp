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

#ifndef RCSHP_RATE_UTILITY_HPP
#define RCSHP_RATE_UTILITY_HPP

#include "rcshp/channel.hpp"
#include "rcshp/estimation.hpp"
#include "rcshp/precoding.hpp"
#include "rcshp/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rcshp
{

/// Utility of the average rate vector. Rates are in bits, the logarithms
/// inside the utilities are natural.
struct UtilitySpec
{
    enum class Kind
    {
        sum_rate,
        proportional_fairness,
        alpha_fair
    };

    Kind kind = Kind::sum_rate;
    double epsilon = 0.0; ///< guard added to every rate for PFS and alpha-fair
    double alpha = 0.0;

    static UtilitySpec sum_rate() { return {}; }
    static UtilitySpec proportional_fairness(double eps) { return {Kind::proportional_fairness, eps, 1.0}; }
    static UtilitySpec alpha_fair(double a, double eps) { return {Kind::alpha_fair, eps, a}; }

    void validate() const;
    std::string name() const;
};

RateVector instantaneous_rates(const ControlVariable &gamma, const ChannelSample &sample,
                               const ChannelStats &stats, const PilotMatrix &pilots,
                               CsiMode csi_mode = CsiMode::estimated);

/// Monte-Carlo average rates with the same sample set reused for every
/// state (common random numbers).
RateVector monte_carlo_average_rates(const ControlPolicy &policy, const ChannelStats &stats,
                                     const PilotMatrix &pilots,
                                     const std::vector<ChannelSample> &samples,
                                     CsiMode csi_mode = CsiMode::estimated,
                                     Backend backend = Backend::openmp);

RateVector monte_carlo_average_rates(const ControlPolicy &policy, const ChannelStats &stats,
                                     const PilotMatrix &pilots, int n_samples, std::uint64_t seed,
                                     CsiMode csi_mode = CsiMode::estimated,
                                     Backend backend = Backend::openmp);

/// Per-sample sum rates of a policy (q-weighted over states), for error bars.
RVec per_sample_sum_rates(const ControlPolicy &policy, const ChannelStats &stats,
                          const PilotMatrix &pilots, const std::vector<ChannelSample> &samples,
                          CsiMode csi_mode = CsiMode::estimated, Backend backend = Backend::openmp);

double utility_value(const RateVector &r_bar, const UtilitySpec &spec);

RVec utility_gradient(const RateVector &r_bar, const UtilitySpec &spec);

} // namespace rcshp

#endif

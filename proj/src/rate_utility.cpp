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

#include "rcshp/rate_utility.hpp"
#include "rcshp/kernels.hpp"
#include "rcshp/pipeline.hpp"

#include <cmath>

namespace rcshp
{

void UtilitySpec::validate() const
{
    if (kind == Kind::proportional_fairness && !(epsilon > 0.0))
        throw ConfigError("proportional fairness needs epsilon > 0");
    if (kind == Kind::alpha_fair && !(alpha >= 0.0))
        throw ConfigError("alpha-fair utility needs alpha >= 0");
    if (epsilon < 0.0)
        throw ConfigError("utility epsilon must be non-negative");
}

std::string UtilitySpec::name() const
{
    switch (kind)
    {
    case Kind::sum_rate:
        return "sum_rate";
    case Kind::proportional_fairness:
        return "pfs";
    case Kind::alpha_fair:
        return "alpha_fair";
    }
    return "unknown";
}

RateVector instantaneous_rates(const ControlVariable &gamma, const ChannelSample &sample,
                               const ChannelStats &stats, const PilotMatrix &pilots, CsiMode csi_mode)
{
    const StateContext ctx = make_state_context(gamma, stats, pilots, csi_mode);
    return run_pipeline(ctx, sample).rates;
}

namespace
{

RVec row_mean(const RMat &m)
{
    RVec acc = RVec::Zero(m.rows());
    for (Eigen::Index i = 0; i < m.cols(); ++i)
        acc += m.col(i);
    return acc / static_cast<double>(m.cols());
}

} // namespace

RateVector monte_carlo_average_rates(const ControlPolicy &policy, const ChannelStats &stats,
                                     const PilotMatrix &pilots, const std::vector<ChannelSample> &samples,
                                     CsiMode csi_mode, Backend backend)
{
    if (samples.empty())
        throw ConfigError("monte_carlo_average_rates: need at least one sample");
    RateVector r_bar = RateVector::Zero(stats.dims.K);
    for (int l = 0; l < policy.L(); ++l)
    {
        if (policy.q(l) == 0.0)
            continue;
        const StateContext ctx = make_state_context(policy.states[l], stats, pilots, csi_mode);
        r_bar += policy.q(l) * row_mean(kernels::batch_rates(ctx, samples, backend));
    }
    return r_bar;
}

RateVector monte_carlo_average_rates(const ControlPolicy &policy, const ChannelStats &stats,
                                     const PilotMatrix &pilots, int n_samples, std::uint64_t seed,
                                     CsiMode csi_mode, Backend backend)
{
    if (n_samples < 1)
        throw ConfigError("monte_carlo_average_rates: n_samples must be >= 1");
    return monte_carlo_average_rates(policy, stats, pilots, sample_channels(stats, n_samples, seed),
                                     csi_mode, backend);
}

RVec per_sample_sum_rates(const ControlPolicy &policy, const ChannelStats &stats,
                          const PilotMatrix &pilots, const std::vector<ChannelSample> &samples,
                          CsiMode csi_mode, Backend backend)
{
    RVec out = RVec::Zero(static_cast<Eigen::Index>(samples.size()));
    for (int l = 0; l < policy.L(); ++l)
    {
        if (policy.q(l) == 0.0)
            continue;
        const StateContext ctx = make_state_context(policy.states[l], stats, pilots, csi_mode);
        out += policy.q(l) * kernels::batch_rates(ctx, samples, backend).colwise().sum().transpose();
    }
    return out;
}

double utility_value(const RateVector &r_bar, const UtilitySpec &spec)
{
    if ((r_bar.array() < 0.0).any())
        throw DataError("utility_value: rates must be non-negative");
    const Eigen::ArrayXd r = r_bar.array() + spec.epsilon;
    switch (spec.kind)
    {
    case UtilitySpec::Kind::sum_rate:
        return r_bar.sum();
    case UtilitySpec::Kind::proportional_fairness:
        return r.log().sum();
    case UtilitySpec::Kind::alpha_fair:
        if (spec.alpha == 0.0)
            return r.sum();
        if (spec.alpha == 1.0)
            return r.log().sum();
        return ((r.pow(1.0 - spec.alpha) - 1.0) / (1.0 - spec.alpha)).sum();
    }
    return 0.0;
}

RVec utility_gradient(const RateVector &r_bar, const UtilitySpec &spec)
{
    const Eigen::ArrayXd r = r_bar.array() + spec.epsilon;
    switch (spec.kind)
    {
    case UtilitySpec::Kind::sum_rate:
        return RVec::Ones(r_bar.size());
    case UtilitySpec::Kind::proportional_fairness:
        return r.inverse().matrix();
    case UtilitySpec::Kind::alpha_fair:
        if (spec.alpha == 0.0)
            return RVec::Ones(r_bar.size());
        return r.pow(-spec.alpha).matrix();
    }
    return RVec::Zero(r_bar.size());
}

} // namespace rcshp

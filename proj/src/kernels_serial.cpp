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

#include "rcshp/jacobian.hpp"
#include "rcshp/kernels.hpp"

namespace rcshp::kernels
{

namespace detail
{

// Shared in-order reduction, used by both backends.
BatchGradient reduce(const std::vector<StateGradient> &parts, Eigen::Index n_phases, Eigen::Index K)
{
    BatchGradient out{RVec::Zero(K), RMat::Zero(n_phases, K), RMat::Zero(K, K)};
    for (const auto &g : parts)
    {
        out.mean_rates += g.rates;
        out.mean_d_theta += g.d_theta;
        out.mean_d_p += g.d_p;
    }
    const double inv = 1.0 / static_cast<double>(parts.size());
    out.mean_rates *= inv;
    out.mean_d_theta *= inv;
    out.mean_d_p *= inv;
    return out;
}

} // namespace detail

namespace serial
{

RMat batch_rates(const StateContext &ctx, std::span<const ChannelSample> samples)
{
    const Eigen::Index K = ctx.gamma.power.size();
    RMat out(K, static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i)
        out.col(i) = run_pipeline(ctx, samples[i]).rates;
    return out;
}

BatchGradient batch_gradients(const StateContext &ctx, std::span<const ChannelSample> samples)
{
    if (samples.empty())
        throw DataError("batch_gradients: empty sample batch");
    std::vector<StateGradient> parts;
    parts.reserve(samples.size());
    for (const auto &s : samples)
        parts.push_back(state_gradient(ctx, s));
    return detail::reduce(parts, ctx.F.size(), ctx.gamma.power.size());
}

} // namespace serial

RMat batch_rates(const StateContext &ctx, std::span<const ChannelSample> samples, Backend backend)
{
    return backend == Backend::openmp ? omp::batch_rates(ctx, samples) : serial::batch_rates(ctx, samples);
}

BatchGradient batch_gradients(const StateContext &ctx, std::span<const ChannelSample> samples,
                              Backend backend)
{
    return backend == Backend::openmp ? omp::batch_gradients(ctx, samples)
                                      : serial::batch_gradients(ctx, samples);
}

} // namespace rcshp::kernels

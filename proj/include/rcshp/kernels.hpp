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

#ifndef RCSHP_KERNELS_HPP
#define RCSHP_KERNELS_HPP

#include "rcshp/channel.hpp"
#include "rcshp/pipeline.hpp"
#include "rcshp/types.hpp"

#include <span>

namespace rcshp
{

/// Batched per-state evaluations over a set of channel samples. Each
/// backend stores per-sample results and reduces them in sample order, so
/// serial and OpenMP results are bitwise identical.
namespace kernels
{

/// K x n matrix of instantaneous rates, column i for sample i.
RMat batch_rates(const StateContext &ctx, std::span<const ChannelSample> samples, Backend backend);

struct BatchGradient
{
    RVec mean_rates;   ///< K
    RMat mean_d_theta; ///< MS x K
    RMat mean_d_p;     ///< K x K
};

BatchGradient batch_gradients(const StateContext &ctx, std::span<const ChannelSample> samples,
                              Backend backend);

namespace serial
{
RMat batch_rates(const StateContext &ctx, std::span<const ChannelSample> samples);
BatchGradient batch_gradients(const StateContext &ctx, std::span<const ChannelSample> samples);
} // namespace serial

namespace omp
{
RMat batch_rates(const StateContext &ctx, std::span<const ChannelSample> samples);
BatchGradient batch_gradients(const StateContext &ctx, std::span<const ChannelSample> samples);
} // namespace omp

} // namespace kernels

} // namespace rcshp

#endif

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

#ifndef RCSHP_JACOBIAN_HPP
#define RCSHP_JACOBIAN_HPP

#include "rcshp/channel.hpp"
#include "rcshp/estimation.hpp"
#include "rcshp/pipeline.hpp"
#include "rcshp/precoding.hpp"
#include "rcshp/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace rcshp
{

/// Gradients of the instantaneous rates of one control state at a frozen
/// (H, N) realization. Column k of each block is the gradient of r_k.
struct StateGradient
{
    RMat d_theta; ///< MS x K
    RMat d_p;     ///< K x K
    RateVector rates;
};

/// Jacobian of the q-weighted rate vector w.r.t. the stacked control
/// variables [theta(1); p(1); ...; theta(L); p(L)].
struct RateJacobian
{
    std::vector<RMat> d_theta; ///< per state, unscaled
    std::vector<RMat> d_p;     ///< per state, unscaled
    RMat assembled;            ///< L(MS+K) x K, block l scaled by q_l
};

/// Forward-mode differentiation of the full estimate/precode/rate chain:
/// one directional derivative per phase and per power entry. A phase
/// perturbation touches a single entry of F, so every intermediate
/// derivative is formed from rank-one updates.
StateGradient state_gradient(const StateContext &ctx, const ChannelSample &sample);

StateGradient state_gradient(const StateContext &ctx, const ChannelSample &sample,
                             const PipelineState &forward);

RMat rate_gradient_theta(const ControlVariable &gamma, const ChannelSample &sample,
                         const ChannelStats &stats, const PilotMatrix &pilots,
                         CsiMode csi_mode = CsiMode::estimated);

RMat rate_gradient_power(const ControlVariable &gamma, const ChannelSample &sample,
                         const ChannelStats &stats, const PilotMatrix &pilots,
                         CsiMode csi_mode = CsiMode::estimated);

RateJacobian policy_jacobian(const ControlPolicy &policy, const ChannelSample &sample,
                             const ChannelStats &stats, const PilotMatrix &pilots,
                             CsiMode csi_mode = CsiMode::estimated);

std::vector<RateJacobian> policy_jacobian(const ControlPolicy &policy,
                                          const std::vector<ChannelSample> &samples,
                                          const ChannelStats &stats, const PilotMatrix &pilots,
                                          CsiMode csi_mode = CsiMode::estimated);

/// Central differences, gradient layout: row i holds d f / d x_i, so the
/// result is dim(x) x dim(f).
RMat finite_difference_jacobian(const std::function<RVec(const RVec &)> &fn, const RVec &point,
                                double step);

struct GradcheckReport
{
    int instances = 0;
    double max_rel_error = 0.0; ///< over entries with |fd| above abs_tol
    double max_abs_error = 0.0; ///< over the remaining near-zero entries
    int failures = 0;           ///< instances with an entry outside both tolerances
    bool passed() const { return failures == 0; }
};

/// Compares state_gradient with central differences on random small
/// instances (M in {4, 8}, S = 2, K in {2, 3}, T_p in {2, 3}).
GradcheckReport gradcheck(int instances, std::uint64_t seed, double rel_tol = 1e-4, double abs_tol = 1e-7);

} // namespace rcshp

#endif

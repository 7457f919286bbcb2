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

#ifndef RCSHP_PIPELINE_HPP
#define RCSHP_PIPELINE_HPP

#include "rcshp/channel.hpp"
#include "rcshp/estimation.hpp"
#include "rcshp/precoding.hpp"
#include "rcshp/types.hpp"

#include <vector>

namespace rcshp
{

/// Everything about one control state that does not depend on the channel
/// realization: the analog precoder and the per-user LMMSE filters.
struct StateContext
{
    ControlVariable gamma;
    CsiMode csi_mode = CsiMode::estimated;
    CMat F;   ///< M x S
    CMat FhF; ///< F^H F
    CMat psi;
    CMat psi_conj;

    // estimated-CSI only, one entry per user
    std::vector<CMat> eff_cov;    ///< F^H C_k F
    std::vector<CMat> FhC;        ///< F^H C_k (S x M)
    std::vector<CMat> psiT_Binv;  ///< Psi^T B_k^{-1} (S x T_p)
    std::vector<CMat> gain_psi;   ///< C_eff Psi^T B_k^{-1} conj(Psi) (S x S)
};

StateContext make_state_context(const ControlVariable &gamma, const ChannelStats &stats,
                                 const PilotMatrix &pilots, CsiMode csi_mode,
                                 double noise_var = 1.0);

/// Forward pass of estimate -> precode -> rate for one realization.
struct PipelineState
{
    CMat H_eff;     ///< true H F (K x S)
    CMat H_hat;     ///< effective channel handed to the precoder (K x S)
    CMat z;         ///< estimated mode: column k = Psi^T B_k^{-1} conj(y_k)
    Eigen::LLT<CMat> V_llt; ///< H_hat^H P H_hat + I
    CMat X;         ///< V^{-1} H_hat^H (S x K), unnormalized column directions
    CMat Gbar;      ///< F X (M x K)
    RVec col_norm;  ///< ||F X_k||
    CMat G;         ///< normalized digital precoder (S x K)
    CMat U;         ///< H F G (K x K)
    RVec gamma_all; ///< 1 + sum_i p_i |U_ki|^2
    RVec gamma_int; ///< 1 + sum_{i != k} p_i |U_ki|^2
    RateVector rates;
};

PipelineState run_pipeline(const StateContext &ctx, const ChannelSample &sample);

} // namespace rcshp

#endif

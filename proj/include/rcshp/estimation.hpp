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

#ifndef RCSHP_ESTIMATION_HPP
#define RCSHP_ESTIMATION_HPP

#include "rcshp/channel.hpp"
#include "rcshp/types.hpp"

#include <cstdint>

namespace rcshp
{

/// Common downlink pilots sent through the S analog-precoder inputs.
struct PilotMatrix
{
    CMat psi; ///< T_p x S
    double per_symbol_power = 1.0;

    int T_p() const { return static_cast<int>(psi.rows()); }
    int S() const { return static_cast<int>(psi.cols()); }
};

struct EffectiveChannelEstimate
{
    CMat h_eff_hat;    ///< K x S, row k is the conjugate-transposed estimate of F^H h_k
    RVec error_trace;  ///< per-user trace of the posterior error covariance
};

/// Per-user linear MMSE filter for a fixed analog precoder.
///
/// With C_eff = F^H C_k F and B = conj(Psi) C_eff Psi^T + noise_var I the
/// estimate is gain * conj(y_k) where gain = C_eff Psi^T B^{-1}.
struct LmmseFilter
{
    CMat eff_cov; ///< S x S
    CMat gain;    ///< S x T_p
};

/// T_p >= S: orthonormal columns from a seeded QR; T_p < S: rows of the
/// unitary DFT. Rows are rescaled to squared norm P_max in both cases.
PilotMatrix generate_pilots(int T_p, int S, double P_max, std::uint64_t seed);

/// Y (K x T_p) with row k = (Psi * conj(F^H h_k) + n_k)^T.
CMat observe_pilots(const ChannelSample &sample, const CMat &F, const PilotMatrix &pilots);

LmmseFilter lmmse_filter(const CMat &covariance, const CMat &F, const PilotMatrix &pilots,
                         double noise_var);

EffectiveChannelEstimate lmmse_estimate(const ChannelStats &stats, const CMat &F,
                                        const PilotMatrix &pilots, const CMat &Y,
                                        double noise_var = 1.0);

} // namespace rcshp

#endif

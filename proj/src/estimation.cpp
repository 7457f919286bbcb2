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

#include "rcshp/estimation.hpp"
#include "rcshp/random.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rcshp
{

PilotMatrix generate_pilots(int T_p, int S, double P_max, std::uint64_t seed)
{
    if (T_p < 1 || S < 1)
        throw ConfigError("generate_pilots: T_p and S must be >= 1");
    if (!(P_max > 0.0))
        throw ConfigError("generate_pilots: pilot power must be positive");

    CMat psi(T_p, S);
    if (T_p >= S)
    {
        Rng rng(derive_seed(seed, 0x917));
        const CMat gauss = complex_normal_matrix(rng, T_p, S);
        Eigen::HouseholderQR<CMat> qr(gauss);
        psi = qr.householderQ() * CMat::Identity(T_p, S);
    }
    else
    {
        for (int t = 0; t < T_p; ++t)
            for (int s = 0; s < S; ++s)
                psi(t, s) = std::polar(1.0 / std::sqrt(double(S)), -2.0 * std::numbers::pi * t * s / S);
    }
    for (int t = 0; t < T_p; ++t)
        psi.row(t) *= std::sqrt(P_max) / psi.row(t).norm();
    return {psi, P_max};
}

CMat observe_pilots(const ChannelSample &sample, const CMat &F, const PilotMatrix &pilots)
{
    if (sample.H.cols() != F.rows() || F.cols() != pilots.psi.cols() ||
        sample.N.rows() != sample.H.rows() || sample.N.cols() != pilots.psi.rows())
        throw DataError("observe_pilots: shape mismatch between sample, F and pilots");
    // H F has rows conj(h_eff_k)^T, so (H F) Psi^T stacks (Psi conj(h_eff_k))^T
    return (sample.H * F) * pilots.psi.transpose() + sample.N;
}

LmmseFilter lmmse_filter(const CMat &covariance, const CMat &F, const PilotMatrix &pilots,
                         double noise_var)
{
    if (noise_var < 0.0)
        throw DataError("lmmse_filter: noise variance must be non-negative");
    const Eigen::Index Tp = pilots.psi.rows();
    CMat eff_cov = F.adjoint() * covariance * F;
    eff_cov = (0.5 * (eff_cov + eff_cov.adjoint())).eval();
    const CMat psi_conj = pilots.psi.conjugate();
    const CMat cross = psi_conj * eff_cov; // (C_eff Psi^T)^H
    CMat B = cross * pilots.psi.transpose();
    B.diagonal().array() += noise_var;

    CMat gain_h;
    if (noise_var > 0.0)
    {
        Eigen::LLT<CMat> llt(B);
        if (llt.info() != Eigen::Success)
            throw NumericalError("lmmse_filter: observation covariance is not positive definite");
        gain_h = llt.solve(cross);
    }
    else
    {
        Eigen::FullPivLU<CMat> lu(B);
        lu.setThreshold(1e-12);
        if (lu.rank() < Tp)
            throw NumericalError("lmmse_filter: observation covariance singular at zero noise (rank " +
                                 std::to_string(lu.rank()) + " < T_p = " + std::to_string(Tp) + ")");
        gain_h = lu.solve(cross);
    }
    return {std::move(eff_cov), gain_h.adjoint()};
}

EffectiveChannelEstimate lmmse_estimate(const ChannelStats &stats, const CMat &F,
                                        const PilotMatrix &pilots, const CMat &Y, double noise_var)
{
    const int K = static_cast<int>(stats.covariances.size());
    if (Y.rows() != K || Y.cols() != pilots.psi.rows() || F.cols() != pilots.psi.cols())
        throw DataError("lmmse_estimate: shape mismatch");
    EffectiveChannelEstimate est{CMat(K, F.cols()), RVec(K)};
    for (int k = 0; k < K; ++k)
    {
        const LmmseFilter filt = lmmse_filter(stats.covariances[k], F, pilots, noise_var);
        const CVec h_hat = filt.gain * Y.row(k).adjoint();
        est.h_eff_hat.row(k) = h_hat.adjoint();
        const CMat err = filt.eff_cov - filt.gain * pilots.psi.conjugate() * filt.eff_cov;
        est.error_trace(k) = err.trace().real();
    }
    return est;
}

} // namespace rcshp

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

#include "rcshp/pipeline.hpp"

#include <cmath>

namespace rcshp
{

StateContext make_state_context(const ControlVariable &gamma, const ChannelStats &stats,
                                 const PilotMatrix &pilots, CsiMode csi_mode, double noise_var)
{
    const SystemDims &d = stats.dims;
    if (gamma.theta.size() != d.n_phases() || gamma.power.size() != d.K)
        throw DataError("control variable does not match the system dimensions");
    if (pilots.psi.cols() != d.S)
        throw DataError("pilot matrix must have S columns");

    StateContext ctx;
    ctx.gamma = gamma;
    ctx.csi_mode = csi_mode;
    ctx.F = analog_from_phases(gamma.theta, d.M, d.S);
    ctx.FhF = ctx.F.adjoint() * ctx.F;
    ctx.psi = pilots.psi;
    ctx.psi_conj = pilots.psi.conjugate();
    if (csi_mode == CsiMode::perfect)
        return ctx;

    ctx.eff_cov.reserve(d.K);
    ctx.FhC.reserve(d.K);
    ctx.psiT_Binv.reserve(d.K);
    ctx.gain_psi.reserve(d.K);
    for (int k = 0; k < d.K; ++k)
    {
        CMat eff_cov = ctx.F.adjoint() * stats.covariances[k] * ctx.F;
        eff_cov = (0.5 * (eff_cov + eff_cov.adjoint())).eval();
        CMat B = ctx.psi_conj * eff_cov * ctx.psi.transpose();
        B.diagonal().array() += noise_var;
        // (B^{-1} conj(Psi))^H = Psi^T B^{-1}
        CMat psiT_Binv;
        if (noise_var > 0.0)
            psiT_Binv = B.llt().solve(ctx.psi_conj).adjoint();
        else
            psiT_Binv = B.fullPivLu().solve(ctx.psi_conj).adjoint();
        ctx.gain_psi.push_back(eff_cov * psiT_Binv * ctx.psi_conj);
        ctx.FhC.push_back(ctx.F.adjoint() * stats.covariances[k]);
        ctx.psiT_Binv.push_back(std::move(psiT_Binv));
        ctx.eff_cov.push_back(std::move(eff_cov));
    }
    return ctx;
}

PipelineState run_pipeline(const StateContext &ctx, const ChannelSample &sample)
{
    const RVec &p = ctx.gamma.power;
    const Eigen::Index K = sample.H.rows();
    const Eigen::Index S = ctx.F.cols();

    PipelineState st;
    st.H_eff = sample.H * ctx.F;
    if (ctx.csi_mode == CsiMode::perfect)
    {
        st.H_hat = st.H_eff;
    }
    else
    {
        if (sample.N.cols() != ctx.psiT_Binv.front().cols())
            throw DataError("sample noise length does not match the pilot count");
        // y_k^T = row k of H_eff Psi^T + N
        const CMat Y = st.H_eff * ctx.psi.transpose() + sample.N;
        st.z.resize(S, K);
        st.H_hat.resize(K, S);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            st.z.col(k) = ctx.psiT_Binv[k] * Y.row(k).adjoint();
            st.H_hat.row(k) = (ctx.eff_cov[k] * st.z.col(k)).adjoint();
        }
    }

    CMat V = st.H_hat.adjoint() * p.asDiagonal() * st.H_hat;
    V.diagonal().array() += 1.0;
    st.V_llt.compute(V);
    st.X = st.V_llt.solve(st.H_hat.adjoint());
    st.Gbar = ctx.F * st.X;
    st.col_norm = st.Gbar.colwise().norm().transpose();
    st.G = st.X;
    for (Eigen::Index k = 0; k < K; ++k)
    {
        if (st.col_norm(k) > kNormFloor)
            st.G.col(k) /= st.col_norm(k);
        else
            st.G.col(k).setZero();
    }

    st.U = st.H_eff * st.G;
    st.gamma_all.resize(K);
    st.gamma_int.resize(K);
    st.rates.resize(K);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        double interference = 1.0;
        for (Eigen::Index i = 0; i < K; ++i)
            if (i != k)
                interference += p(i) * std::norm(st.U(k, i));
        const double own = p(k) * std::norm(st.U(k, k));
        st.gamma_all(k) = interference + own;
        st.gamma_int(k) = interference;
        st.rates(k) = std::log2(1.0 + own / st.gamma_int(k));
    }
    return st;
}

} // namespace rcshp

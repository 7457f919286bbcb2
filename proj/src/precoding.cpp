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

#include "rcshp/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace rcshp
{

double ControlVariable::feasibility_residual(double P_max) const
{
    double res = 0.0;
    const double two_pi = 2.0 * std::numbers::pi;
    for (Eigen::Index i = 0; i < theta.size(); ++i)
        res = std::max({res, -theta(i), theta(i) - two_pi});
    for (Eigen::Index i = 0; i < power.size(); ++i)
        res = std::max(res, -power(i));
    if (power.size())
        res = std::max(res, power.sum() - P_max);
    return res;
}

double ControlPolicy::feasibility_residual(double P_max) const
{
    double res = 0.0;
    for (const auto &s : states)
        res = std::max(res, s.feasibility_residual(P_max));
    for (Eigen::Index l = 0; l < q.size(); ++l)
        res = std::max(res, -q(l));
    if (q.size())
        res = std::max(res, std::abs(q.sum() - 1.0));
    return res;
}

void ControlPolicy::check_feasible(double P_max, double tol) const
{
    if (q.size() != L() || L() == 0)
        throw DataError("ControlPolicy: q must have one entry per state");
    const double res = feasibility_residual(P_max);
    if (res > tol)
        throw DataError("ControlPolicy: infeasible (residual " + std::to_string(res) + ")");
}

CMat analog_from_phases(const RVec &theta, int M, int S)
{
    if (theta.size() != static_cast<Eigen::Index>(M) * S)
        throw DataError("analog_from_phases: theta must have M*S entries");
    CMat F(M, S);
    const double amp = 1.0 / std::sqrt(double(M));
    for (int j = 0; j < S; ++j)
        for (int i = 0; i < M; ++i)
            F(i, j) = std::polar(amp, theta(j * M + i));
    return F;
}

CMat duality_core(const CMat &H_eff, const RVec &p)
{
    const CMat HhP = H_eff.adjoint() * p.asDiagonal();
    CMat V = HhP * H_eff;
    V.diagonal().array() += 1.0;
    return V.llt().solve(HhP);
}

namespace
{

DigitalPrecoder normalize_columns(CMat core, const CMat &F, const RVec *p)
{
    const Eigen::Index K = core.cols();
    DigitalPrecoder out{std::move(core), RVec::Zero(K)};
    for (Eigen::Index k = 0; k < K; ++k)
    {
        const double n = (F * out.G.col(k)).norm();
        if (n > kNormFloor)
        {
            out.G.col(k) /= n;
            out.norm_factors(k) = 1.0 / n;
        }
        else
        {
            out.G.col(k).setZero();
        }
        if (p && (*p)(k) <= 0.0)
            out.norm_factors(k) = 0.0;
    }
    return out;
}

} // namespace

DigitalPrecoder duality_digital_precoder(const CMat &H_eff, const RVec &p, const CMat &F)
{
    if (p.size() != H_eff.rows() || F.cols() != H_eff.cols())
        throw DataError("duality_digital_precoder: shape mismatch");
    if ((p.array() < 0.0).any())
        throw DataError("duality_digital_precoder: negative power");
    // (H^H P H + I)^{-1} H^H; right-multiplying by P only rescales columns
    CMat V = H_eff.adjoint() * p.asDiagonal() * H_eff;
    V.diagonal().array() += 1.0;
    CMat core = V.llt().solve(H_eff.adjoint());
    return normalize_columns(std::move(core), F, &p);
}

CMat rzf_core(const CMat &H_eff, double alpha)
{
    CMat W = H_eff * H_eff.adjoint();
    W.diagonal().array() += alpha;
    // W Hermitian PD; H^H W^{-1} = (W^{-1} H)^H
    return W.llt().solve(H_eff).adjoint();
}

DigitalPrecoder rzf_digital_precoder(const CMat &H_eff, double alpha, const CMat &F)
{
    if (!(alpha > 0.0))
        throw DataError("rzf_digital_precoder: alpha must be positive");
    if (F.cols() != H_eff.cols())
        throw DataError("rzf_digital_precoder: shape mismatch");
    return normalize_columns(rzf_core(H_eff, alpha), F, nullptr);
}

} // namespace rcshp

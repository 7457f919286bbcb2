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
#include "rcshp/random.hpp"
#include "rcshp/rate_utility.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace rcshp
{

namespace
{

constexpr cdouble kI{0.0, 1.0};

// One perturbation direction: either the phase of F(m, n) or the power of
// user `user`.
struct Direction
{
    bool phase = false;
    Eigen::Index m = 0;
    Eigen::Index n = 0;
    cdouble c{}; // dF(m, n) = j F(m, n)
    Eigen::Index user = -1;
};

class ForwardDiff
{
public:
    ForwardDiff(const StateContext &ctx, const ChannelSample &sample, const PipelineState &st)
        : ctx_(ctx), s_(sample), st_(st), p_(ctx.gamma.power)
    {
        K_ = sample.H.rows();
        S_ = ctx.F.cols();
        FhF_X_ = ctx.FhF * st.X;
        HhP_ = st.H_hat.adjoint() * p_.asDiagonal();
        dH_hat_.resize(K_, S_);
        dV_.resize(S_, S_);
        dX_.resize(S_, K_);
        dG_.resize(S_, K_);
        dU_.resize(K_, K_);
        dr_.resize(K_);
    }

    // Returns d rates along `dir`.
    const RVec &derivative(const Direction &dir)
    {
        const auto &H = s_.H;
        const auto &st = st_;

        // effective channel handed to the precoder
        if (dir.phase)
        {
            if (ctx_.csi_mode == CsiMode::perfect)
            {
                dH_hat_.setZero();
                dH_hat_.col(dir.n) = dir.c * H.col(dir.m);
            }
            else
            {
                const cdouble cc = std::conj(dir.c);
                for (Eigen::Index k = 0; k < K_; ++k)
                {
                    // d h_hat = R (dC_eff z) + (gain conj(Psi)) dF^H h_k
                    const auto w = ctx_.FhC[k].col(dir.m);
                    const auto z = st.z.col(k);
                    CVec v = dir.c * z(dir.n) * w;
                    v(dir.n) += cc * w.dot(z);
                    CVec dh = v - ctx_.gain_psi[k] * v;
                    dh += cc * std::conj(H(k, dir.m)) * ctx_.gain_psi[k].col(dir.n);
                    dH_hat_.row(k) = dh.adjoint();
                }
            }
            // dV = dH^H P H + H^H P dH
            const CMat t = HhP_ * dH_hat_;
            dV_ = t + t.adjoint();
            // dX = V^{-1} (dH^H - dV X)
            dX_ = st.V_llt.solve(dH_hat_.adjoint() - dV_ * st.X);
        }
        else
        {
            const auto h = st.H_hat.row(dir.user);
            dV_ = h.adjoint() * h;
            dX_ = st.V_llt.solve(-dV_ * st.X);
        }

        // normalization: n_k = ||F X_k||
        for (Eigen::Index k = 0; k < K_; ++k)
        {
            const double nk = st.col_norm(k);
            if (!(nk > kNormFloor))
            {
                dG_.col(k).setZero();
                continue;
            }
            double re = std::real(FhF_X_.col(k).dot(dX_.col(k)));
            if (dir.phase)
                re += std::real(dir.c * st.X(dir.n, k) * std::conj(st.Gbar(dir.m, k)));
            const double dn = re / nk;
            dG_.col(k) = dX_.col(k) / nk - st.X.col(k) * (dn / (nk * nk));
        }

        // dU = H dF G + H F dG
        dU_.noalias() = st.H_eff * dG_;
        if (dir.phase)
            dU_.noalias() += (dir.c * H.col(dir.m)) * st.G.row(dir.n);

        const double inv_ln2 = 1.0 / std::numbers::ln2;
        for (Eigen::Index k = 0; k < K_; ++k)
        {
            double d_int = 0.0;
            double d_own = 0.0;
            for (Eigen::Index i = 0; i < K_; ++i)
            {
                double da = 2.0 * p_(i) * std::real(std::conj(st.U(k, i)) * dU_(k, i));
                if (!dir.phase && i == dir.user)
                    da += std::norm(st.U(k, i));
                (i == k ? d_own : d_int) += da;
            }
            dr_(k) = ((d_own + d_int) / st.gamma_all(k) - d_int / st.gamma_int(k)) * inv_ln2;
        }
        return dr_;
    }

private:
    const StateContext &ctx_;
    const ChannelSample &s_;
    const PipelineState &st_;
    const RVec &p_;
    Eigen::Index K_ = 0;
    Eigen::Index S_ = 0;
    CMat FhF_X_;
    CMat HhP_;
    CMat dH_hat_;
    CMat dV_;
    CMat dX_;
    CMat dG_;
    CMat dU_;
    RVec dr_;
};

} // namespace

StateGradient state_gradient(const StateContext &ctx, const ChannelSample &sample,
                             const PipelineState &forward)
{
    const Eigen::Index M = ctx.F.rows();
    const Eigen::Index S = ctx.F.cols();
    const Eigen::Index K = sample.H.rows();

    StateGradient out{RMat(M * S, K), RMat(K, K), forward.rates};
    ForwardDiff diff(ctx, sample, forward);
    Direction dir;
    dir.phase = true;
    for (Eigen::Index n = 0; n < S; ++n)
        for (Eigen::Index m = 0; m < M; ++m)
        {
            dir.m = m;
            dir.n = n;
            dir.c = kI * ctx.F(m, n);
            out.d_theta.row(n * M + m) = diff.derivative(dir).transpose();
        }
    dir.phase = false;
    for (Eigen::Index j = 0; j < K; ++j)
    {
        dir.user = j;
        out.d_p.row(j) = diff.derivative(dir).transpose();
    }
    return out;
}

StateGradient state_gradient(const StateContext &ctx, const ChannelSample &sample)
{
    const PipelineState forward = run_pipeline(ctx, sample);
    return state_gradient(ctx, sample, forward);
}

RMat rate_gradient_theta(const ControlVariable &gamma, const ChannelSample &sample,
                         const ChannelStats &stats, const PilotMatrix &pilots, CsiMode csi_mode)
{
    return state_gradient(make_state_context(gamma, stats, pilots, csi_mode), sample).d_theta;
}

RMat rate_gradient_power(const ControlVariable &gamma, const ChannelSample &sample,
                         const ChannelStats &stats, const PilotMatrix &pilots, CsiMode csi_mode)
{
    return state_gradient(make_state_context(gamma, stats, pilots, csi_mode), sample).d_p;
}

RateJacobian policy_jacobian(const ControlPolicy &policy, const ChannelSample &sample,
                             const ChannelStats &stats, const PilotMatrix &pilots, CsiMode csi_mode)
{
    const SystemDims &d = stats.dims;
    const int L = policy.L();
    const int block = d.state_size();
    RateJacobian J;
    J.assembled = RMat::Zero(static_cast<Eigen::Index>(L) * block, d.K);
    for (int l = 0; l < L; ++l)
    {
        StateGradient g = state_gradient(make_state_context(policy.states[l], stats, pilots, csi_mode), sample);
        const double ql = policy.q(l);
        J.assembled.block(l * block, 0, d.n_phases(), d.K) = ql * g.d_theta;
        J.assembled.block(l * block + d.n_phases(), 0, d.K, d.K) = ql * g.d_p;
        J.d_theta.push_back(std::move(g.d_theta));
        J.d_p.push_back(std::move(g.d_p));
    }
    return J;
}

std::vector<RateJacobian> policy_jacobian(const ControlPolicy &policy,
                                          const std::vector<ChannelSample> &samples,
                                          const ChannelStats &stats, const PilotMatrix &pilots,
                                          CsiMode csi_mode)
{
    std::vector<RateJacobian> out;
    out.reserve(samples.size());
    for (const auto &s : samples)
        out.push_back(policy_jacobian(policy, s, stats, pilots, csi_mode));
    return out;
}

RMat finite_difference_jacobian(const std::function<RVec(const RVec &)> &fn, const RVec &point,
                                double step)
{
    if (!(step > 0.0))
        throw ConfigError("finite_difference_jacobian: step must be positive");
    RMat J;
    RVec x = point;
    for (Eigen::Index i = 0; i < point.size(); ++i)
    {
        x(i) = point(i) + step;
        const RVec plus = fn(x);
        x(i) = point(i) - step;
        const RVec minus = fn(x);
        x(i) = point(i);
        if (i == 0)
            J.resize(point.size(), plus.size());
        J.row(i) = ((plus - minus) / (2.0 * step)).transpose();
    }
    return J;
}

GradcheckReport gradcheck(int instances, std::uint64_t seed, double rel_tol, double abs_tol)
{
    GradcheckReport rep;
    const double two_pi = 2.0 * std::numbers::pi;
    for (int n = 0; n < instances; ++n)
    {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(n)));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        SystemDims d;
        d.M = unif(rng) < 0.5 ? 4 : 8;
        d.S = 2;
        d.K = unif(rng) < 0.5 ? 2 : 3;
        d.T_p = unif(rng) < 0.5 ? 2 : 3;
        d.L = 1;
        d.P_max = 10.0;
        GeometryModelParams gp;
        gp.n_paths = 4;
        const ChannelStats stats = build_geometry_stats(d, gp, rng());
        const PilotMatrix pilots = generate_pilots(d.T_p, d.S, d.P_max, rng());
        const ChannelSample sample = ChannelSampler(stats).draw(rng(), 0);

        ControlVariable gamma;
        gamma.theta.resize(d.n_phases());
        for (auto &t : gamma.theta)
            t = two_pi * unif(rng);
        gamma.power.resize(d.K);
        for (auto &p : gamma.power)
            p = 0.2 + unif(rng);
        gamma.power *= 0.8 * d.P_max / gamma.power.sum();

        const StateGradient g = state_gradient(make_state_context(gamma, stats, pilots, CsiMode::estimated), sample);
        const RMat fd_theta = finite_difference_jacobian(
            [&](const RVec &th) {
                return instantaneous_rates({th, gamma.power}, sample, stats, pilots);
            },
            gamma.theta, 1e-5);
        const RMat fd_p = finite_difference_jacobian(
            [&](const RVec &p) {
                return instantaneous_rates({gamma.theta, p}, sample, stats, pilots);
            },
            gamma.power, 1e-5);

        bool ok = true;
        auto compare = [&](const RMat &a, const RMat &f) {
            for (Eigen::Index i = 0; i < a.size(); ++i)
            {
                const double err = std::abs(a(i) - f(i));
                if (std::abs(f(i)) > abs_tol)
                {
                    rep.max_rel_error = std::max(rep.max_rel_error, err / std::abs(f(i)));
                    ok = ok && (err <= rel_tol * std::abs(f(i)) || err <= abs_tol);
                }
                else
                {
                    rep.max_abs_error = std::max(rep.max_abs_error, err);
                    ok = ok && err <= abs_tol;
                }
            }
        };
        compare(g.d_theta, fd_theta);
        compare(g.d_p, fd_p);
        rep.failures += ok ? 0 : 1;
        ++rep.instances;
    }
    return rep;
}

} // namespace rcshp

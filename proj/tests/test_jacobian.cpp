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

#include "doctest.h"
#include "test_support.hpp"

#include "rcshp/jacobian.hpp"
#include "rcshp/rate_utility.hpp"
#include "rcshp/ssca.hpp"

#include <cmath>
#include <functional>

using namespace rcshp;

namespace
{

// Richardson-extrapolated central difference, row i = d f / d x_i.
RMat fd_oracle(const std::function<RVec(const RVec &)> &f, const RVec &x, double h = 1e-4)
{
    RMat J;
    for (Eigen::Index i = 0; i < x.size(); ++i)
    {
        auto central = [&](double step) {
            RVec xp = x, xm = x;
            xp(i) += step;
            xm(i) -= step;
            return RVec((f(xp) - f(xm)) / (2.0 * step));
        };
        const RVec d = (4.0 * central(h / 2) - central(h)) / 3.0;
        if (i == 0)
            J.resize(x.size(), d.size());
        J.row(i) = d.transpose();
    }
    return J;
}

void check_close(const RMat &analytic, const RMat &fd, double rel = 1e-5, double abs_tol = 1e-7)
{
    REQUIRE(analytic.rows() == fd.rows());
    REQUIRE(analytic.cols() == fd.cols());
    for (Eigen::Index i = 0; i < fd.size(); ++i)
    {
        const double err = std::abs(analytic(i) - fd(i));
        CHECK(err <= std::max(abs_tol, rel * std::abs(fd(i))));
    }
}

struct Instance
{
    SystemDims d;
    ChannelStats stats;
    PilotMatrix pilots;
    ChannelSample sample;
    ControlVariable gamma;
};

Instance make_instance(int M, int S, int K, int Tp, std::uint64_t seed)
{
    Instance in;
    in.d = test::small_dims(M, S, K, Tp, 1);
    GeometryModelParams gp;
    gp.n_paths = 5;
    in.stats = build_geometry_stats(in.d, gp, seed);
    in.pilots = generate_pilots(Tp, S, in.d.P_max, seed + 1);
    in.sample = ChannelSampler(in.stats).draw(seed + 2, 0);
    in.gamma = test::random_state(in.d, seed + 3);
    return in;
}

} // namespace

TEST_CASE("analytic rate gradients match finite differences")
{
    struct Shape
    {
        int M, S, K, Tp;
    };
    for (const Shape sh : {Shape{4, 2, 2, 2}, Shape{8, 2, 3, 3}, Shape{6, 3, 3, 2}, Shape{8, 4, 2, 5}})
        for (CsiMode mode : {CsiMode::estimated, CsiMode::perfect})
            for (std::uint64_t seed : {1u, 2u, 3u})
            {
                const Instance in = make_instance(sh.M, sh.S, sh.K, sh.Tp, 10 * seed + sh.M);
                const StateContext ctx = make_state_context(in.gamma, in.stats, in.pilots, mode);
                const StateGradient g = state_gradient(ctx, in.sample);
                auto f_theta = [&](const RVec &th) {
                    return instantaneous_rates({th, in.gamma.power}, in.sample, in.stats, in.pilots, mode);
                };
                auto f_p = [&](const RVec &p) {
                    return instantaneous_rates({in.gamma.theta, p}, in.sample, in.stats, in.pilots, mode);
                };
                check_close(g.d_theta, fd_oracle(f_theta, in.gamma.theta));
                check_close(g.d_p, fd_oracle(f_p, in.gamma.power));
                CHECK((g.rates - f_p(in.gamma.power)).cwiseAbs().maxCoeff() < 1e-12);
            }
}

TEST_CASE("power gradient at a zero-power user matches a one-sided difference")
{
    const Instance base = make_instance(8, 2, 3, 2, 77);
    ControlVariable g = base.gamma;
    g.power(1) = 0.0;
    const StateGradient sg =
        state_gradient(make_state_context(g, base.stats, base.pilots, CsiMode::estimated), base.sample);
    const double h = 1e-6;
    ControlVariable gp = g;
    gp.power(1) = h;
    ControlVariable g2 = g;
    g2.power(1) = 2 * h;
    const RVec r0 = instantaneous_rates(g, base.sample, base.stats, base.pilots);
    const RVec r1 = instantaneous_rates(gp, base.sample, base.stats, base.pilots);
    const RVec r2 = instantaneous_rates(g2, base.sample, base.stats, base.pilots);
    const RVec fd = (-3.0 * r0 + 4.0 * r1 - r2) / (2.0 * h);
    for (int k = 0; k < 3; ++k)
        CHECK(std::abs(sg.d_p(1, k) - fd(k)) <= 1e-5 * std::max(1.0, std::abs(fd(k))));
    CHECK(sg.d_p(1, 1) > 0.0);
}

TEST_CASE("policy Jacobian is the q-weighted stack of state gradients")
{
    const SystemDims d = test::small_dims(4, 2, 2, 2, 2);
    const ChannelStats st = build_geometry_stats(d, GeometryModelParams{}, 3);
    const PilotMatrix pil = generate_pilots(2, 2, d.P_max, 3);
    ControlPolicy pol{{test::random_state(d, 1), test::random_state(d, 2)}, (RVec(2) << 0.3, 0.7).finished()};
    const ChannelSample s = ChannelSampler(st).draw(1, 0);
    const RateJacobian J = policy_jacobian(pol, s, st, pil);
    REQUIRE(J.assembled.rows() == 2 * d.state_size());

    auto weighted = [&](const RVec &x) {
        ControlPolicy p = pol;
        Eigen::Index off = 0;
        for (auto &state : p.states)
        {
            state.theta = x.segment(off, d.n_phases());
            state.power = x.segment(off + d.n_phases(), d.K);
            off += d.state_size();
        }
        RVec r = RVec::Zero(d.K);
        for (int l = 0; l < 2; ++l)
            r += p.q(l) * instantaneous_rates(p.states[l], s, st, pil);
        return r;
    };
    check_close(J.assembled, fd_oracle(weighted, stack_states(pol.states)));
    CHECK(J.d_theta[1].isApprox(rate_gradient_theta(pol.states[1], s, st, pil)));
    CHECK(J.d_p[0].isApprox(rate_gradient_power(pol.states[0], s, st, pil)));
}

TEST_CASE("library finite-difference helper")
{
    auto f = [](const RVec &x) { return RVec((RVec(2) << x(0) * x(1), std::sin(x(0))).finished()); };
    const RVec x = (RVec(2) << 0.3, -1.2).finished();
    const RMat J = finite_difference_jacobian(f, x, 1e-6);
    CHECK(J(0, 0) == doctest::Approx(-1.2));
    CHECK(J(1, 0) == doctest::Approx(0.3));
    CHECK(J(0, 1) == doctest::Approx(std::cos(0.3)));
    CHECK(J(1, 1) == doctest::Approx(0.0));
    CHECK_THROWS_AS(finite_difference_jacobian(f, x, 0.0), ConfigError);
}

TEST_CASE("gradcheck report on random desk instances")
{
    const GradcheckReport rep = gradcheck(20, 5);
    CHECK(rep.instances == 20);
    CHECK(rep.passed());
    CHECK(rep.max_rel_error < 1e-4);
}

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

#include "rcshp/harness.hpp"
#include "rcshp/jacobian.hpp"
#include "rcshp/random.hpp"
#include "rcshp/ssca.hpp"

#include <cmath>
#include <functional>
#include <numbers>

using namespace rcshp;

namespace
{

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Projection onto {p >= 0, sum p <= B} by bisection on the multiplier.
RVec bisection_power_projection(const RVec &v, double B)
{
    if (v.cwiseMax(0.0).sum() <= B)
        return v.cwiseMax(0.0);
    double lo = 0.0, hi = v.maxCoeff();
    for (int i = 0; i < 200; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        if ((v.array() - mid).max(0.0).sum() > B)
            lo = mid;
        else
            hi = mid;
    }
    return (v.array() - 0.5 * (lo + hi)).max(0.0);
}

// Maximizes f.(x - x_t) - tau ||x - x_t||^2 over the feasible set by
// projected gradient ascent with a fixed step.
ControlVariable qp_oracle(const RVec &f_theta, const RVec &f_p, const ControlVariable &xt, double tau, double P_max)
{
    ControlVariable x = xt;
    const double step = 1.0 / (4.0 * tau);
    for (int it = 0; it < 5000; ++it)
    {
        const RVec gt = f_theta - 2.0 * tau * (x.theta - xt.theta);
        const RVec gp = f_p - 2.0 * tau * (x.power - xt.power);
        x.theta = (x.theta + step * gt).cwiseMax(0.0).cwiseMin(kTwoPi);
        x.power = bisection_power_projection(x.power + step * gp, P_max);
    }
    return x;
}

double golden_max(const std::function<double(double)> &f)
{
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = 1.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    for (int i = 0; i < 200; ++i)
    {
        if (f(c) > f(d))
            b = d;
        else
            a = c;
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    return 0.5 * (a + b);
}

} // namespace

TEST_CASE("step schedule validation and values")
{
    StepSchedule s;
    CHECK_NOTHROW(s.validate());
    CHECK(s.rho(0) == 1.0);
    CHECK(s.gamma(0) == 1.0);
    CHECK(s.rho(3) == doctest::Approx(std::pow(4.0, -0.9)));
    CHECK(s.gamma(9) == doctest::Approx(0.1));
    for (auto [re, ge] : {std::pair{0.5, 0.8}, std::pair{0.8, 0.8}, std::pair{0.8, 1.1}, std::pair{1.0, 1.0}})
    {
        StepSchedule bad;
        bad.rho_exponent = re;
        bad.gamma_exponent = ge;
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }
    StepSchedule bad_tau;
    bad_tau.tau_gamma = 0.0;
    CHECK_THROWS_AS(bad_tau.validate(), ConfigError);
}

TEST_CASE("simplex and power projections")
{
    const RVec a = project_simplex((RVec(2) << 0.2, 0.9).finished());
    CHECK(a(0) == doctest::Approx(0.15));
    CHECK(a(1) == doctest::Approx(0.85));
    const RVec b = project_simplex((RVec(3) << 10.0, 0.0, 0.0).finished());
    CHECK(b(0) == doctest::Approx(1.0));
    CHECK(b(1) == doctest::Approx(0.0));
    const RVec c = project_power((RVec(2) << 3.0, 3.0).finished(), 4.0);
    CHECK(c(0) == doctest::Approx(2.0));
    CHECK(c(1) == doctest::Approx(2.0));
    const RVec inside = (RVec(3) << 1.0, 0.5, 0.0).finished();
    CHECK(project_power(inside, 4.0) == inside);
    CHECK(project_power((RVec(2) << -1.0, 2.0).finished(), 4.0)(0) == 0.0);

    Rng rng(5);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        RVec v(6);
        for (auto &x : v)
            x = n(rng);
        const RVec p = project_power(v, 2.5);
        CHECK((p - bisection_power_projection(v, 2.5)).cwiseAbs().maxCoeff() < 1e-9);
        const RVec s = project_simplex(v, 1.0);
        CHECK(s.minCoeff() >= 0.0);
        CHECK(s.sum() == doctest::Approx(1.0));
    }
}

TEST_CASE("gamma subproblem closed form matches a projected-gradient QP")
{
    const SystemDims d = test::small_dims(4, 2, 3, 2, 2);
    Rng rng(8);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial)
    {
        const std::vector<ControlVariable> xt{test::random_state(d, 100 + trial), test::random_state(d, 200 + trial)};
        RVec f(2 * d.state_size());
        for (auto &x : f)
            x = 4.0 * n(rng);
        const double tau = 0.3 + 0.1 * trial;
        const auto sol = solve_gamma_subproblems(f, xt, tau, d.P_max);
        for (int l = 0; l < 2; ++l)
        {
            const auto off = l * d.state_size();
            const ControlVariable ref =
                qp_oracle(f.segment(off, d.n_phases()), f.segment(off + d.n_phases(), d.K), xt[l], tau, d.P_max);
            CHECK((sol[l].theta - ref.theta).cwiseAbs().maxCoeff() < 1e-6);
            CHECK((sol[l].power - ref.power).cwiseAbs().maxCoeff() < 1e-6);
            CHECK(sol[l].feasibility_residual(d.P_max) <= 1e-12);
        }
    }
}

TEST_CASE("gamma subproblem edge cases")
{
    const SystemDims d = test::small_dims(4, 2, 2, 2, 1);
    ControlVariable x = test::random_state(d, 3);
    x.theta(0) = kTwoPi - 0.1;
    RVec f = RVec::Zero(d.state_size());
    const auto same = solve_gamma_subproblems(f, {x}, 1.0, d.P_max);
    CHECK((same[0].theta - x.theta).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((same[0].power - x.power).cwiseAbs().maxCoeff() < 1e-15);

    f(0) = 2.0 * 0.6; // pushes theta_0 to 2 pi + 0.5
    const auto clipped = solve_gamma_subproblems(f, {x}, 1.0, d.P_max, ThetaProjection::box_clip);
    CHECK(clipped[0].theta(0) == kTwoPi);
    const auto wrapped = solve_gamma_subproblems(f, {x}, 1.0, d.P_max, ThetaProjection::wrap);
    CHECK(wrapped[0].theta(0) == doctest::Approx(0.5));

    CHECK_THROWS_AS(solve_gamma_subproblems(f, {x}, 0.0, d.P_max), ConfigError);
    CHECK_THROWS_AS(solve_gamma_subproblems(RVec::Zero(3), {x}, 1.0, d.P_max), DataError);
}

TEST_CASE("iterate averaging")
{
    const RVec a = (RVec(2) << 0.0, 1.0).finished();
    const RVec b = (RVec(2) << 1.0, 0.0).finished();
    const RVec m = average_iterates(a, b, 0.25);
    CHECK(m(0) == doctest::Approx(0.25));
    CHECK(m(1) == doctest::Approx(0.75));
    CHECK(average_iterates(a, b, 1.0) == b);
    CHECK_THROWS_AS(average_iterates(a, b, 0.0), ConfigError);
    CHECK_THROWS_AS(average_iterates(a, b, 1.5), ConfigError);

    // convex combination of feasible points stays feasible
    const SystemDims d = test::small_dims();
    const std::vector<ControlVariable> s1{test::random_state(d, 1, 1.0)};
    const std::vector<ControlVariable> s2{test::random_state(d, 2, 1.0)};
    for (double g : {0.1, 0.5, 0.9})
        CHECK(average_iterates(s1, s2, g)[0].feasibility_residual(d.P_max) <= 1e-12);
}

TEST_CASE("q subproblem against a one-dimensional search")
{
    Rng rng(11);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (const UtilitySpec spec : {UtilitySpec::sum_rate(), UtilitySpec::proportional_fairness(1e-3),
                                   UtilitySpec::alpha_fair(2.0, 1e-3)})
        for (int trial = 0; trial < 8; ++trial)
        {
            RMat r(3, 2);
            for (auto &x : r.reshaped())
                x = u(rng);
            const double q0 = 0.1 + 0.1 * trial;
            const RVec qt = (RVec(2) << q0, 1.0 - q0).finished();
            const double tau = 0.5;
            auto obj = [&](double a) {
                const RVec q = (RVec(2) << a, 1.0 - a).finished();
                return utility_value(r * q, spec) - tau * (q - qt).squaredNorm();
            };
            const QSolution sol = solve_q_subproblem(r, qt, spec, tau);
            CHECK(sol.residual <= 1e-8);
            CHECK(q_subproblem_residual(r, qt, spec, tau, sol.q) <= 1e-8);
            CHECK(sol.q(0) == doctest::Approx(golden_max(obj)).epsilon(1e-6).scale(1.0));
            CHECK(sol.q.sum() == doctest::Approx(1.0));
        }
    const RMat r1 = RMat::Ones(2, 1);
    CHECK(solve_q_subproblem(r1, RVec::Ones(1), UtilitySpec::sum_rate(), 1.0).q(0) == 1.0);
}

namespace
{

struct Problem
{
    SystemDims d = test::small_dims(8, 2, 3, 2, 2);
    ChannelStats stats;
    PilotMatrix pilots;
    Problem()
    {
        stats = build_geometry_stats(d, GeometryModelParams{}, 41);
        pilots = generate_pilots(d.T_p, d.S, d.P_max, 42);
    }
};

} // namespace

TEST_CASE("surrogate updates")
{
    Problem pr;
    const ControlPolicy pol = initialize_policy(pr.d, pr.stats, 1);
    const auto batch = sample_channels(pr.stats, 5, 3);
    const SurrogateState zero = SurrogateState::zeros(pr.d, 2);
    CHECK(zero.r_hat.rows() == pr.d.K);
    CHECK(zero.f_gamma.size() == 2 * pr.d.state_size());

    const RMat r1 = update_rate_surrogate(zero, pol, batch, pr.stats, pr.pilots, 1.0);
    for (int l = 0; l < 2; ++l)
    {
        const RVec ref = monte_carlo_average_rates({{pol.states[l]}, RVec::Ones(1)}, pr.stats, pr.pilots, batch);
        CHECK((r1.col(l) - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
    SurrogateState s = zero;
    s.r_hat = RMat::Constant(pr.d.K, 2, 2.0);
    const RMat half = update_rate_surrogate(s, pol, batch, pr.stats, pr.pilots, 0.5);
    CHECK((half - (0.5 * s.r_hat + 0.5 * r1)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(update_rate_surrogate(zero, pol, batch, pr.stats, pr.pilots, 0.0), ConfigError);

    s.r_hat = r1;
    const RVec f = update_gradient_surrogate(s, pol, batch, pr.stats, pr.pilots, 1.0, UtilitySpec::sum_rate());
    const RVec ones = RVec::Ones(pr.d.K);
    RVec ref = RVec::Zero(f.size());
    for (const auto &smp : batch)
    {
        const RateJacobian J = policy_jacobian(pol, smp, pr.stats, pr.pilots);
        ref += J.assembled * ones / static_cast<double>(batch.size());
    }
    CHECK((f - ref).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("initial policy is feasible and has distinct states")
{
    Problem pr;
    const ControlPolicy pol = initialize_policy(pr.d, pr.stats, 9);
    CHECK(pol.L() == 2);
    CHECK(pol.feasibility_residual(pr.d.P_max) <= 1e-12);
    CHECK(pol.q(0) == doctest::Approx(0.5));
    CHECK((stack_states({pol.states[0]}) - stack_states({pol.states[1]})).norm() > 1e-6);
}

TEST_CASE("optimizer: zero iterations, determinism, feasibility")
{
    Problem pr;
    const ControlPolicy init = initialize_policy(pr.d, pr.stats, 2);
    SscaOptions opt;
    opt.n_iters = 0;
    const SscaResult none = ssca_optimize(pr.stats, pr.pilots, UtilitySpec::sum_rate(), StepSchedule{}, init, opt);
    CHECK(none.trace.records.empty());
    CHECK(stack_states(none.policy.states) == stack_states(init.states));

    opt.n_iters = 12;
    opt.mc_every = 5;
    opt.mc_samples = 50;
    const SscaResult a = ssca_optimize(pr.stats, pr.pilots, UtilitySpec::sum_rate(), StepSchedule{}, init, opt);
    opt.backend = Backend::serial;
    const SscaResult b = ssca_optimize(pr.stats, pr.pilots, UtilitySpec::sum_rate(), StepSchedule{}, init, opt);
    CHECK(stack_states(a.policy.states) == stack_states(b.policy.states));
    CHECK(a.policy.q == b.policy.q);
    REQUIRE(a.trace.records.size() == 12);
    for (const auto &rec : a.trace.records)
    {
        CHECK(rec.feasibility_residual <= 1e-9);
        CHECK(std::isfinite(rec.surrogate_utility));
        const bool evaluated = rec.iter % 5 == 0 || rec.iter == 11;
        CHECK(std::isnan(rec.mc_utility) != evaluated);
    }
}

TEST_CASE("optimizer improves on its starting point and on equal power")
{
    Problem pr;
    const ControlPolicy init = initialize_policy(pr.d, pr.stats, 3);
    SscaOptions opt;
    opt.n_iters = 40;
    opt.mc_every = 0;
    opt.seed = 17;
    const SscaResult res = ssca_optimize(pr.stats, pr.pilots, UtilitySpec::sum_rate(), StepSchedule{}, init, opt);
    const auto eval = sample_channels(pr.stats, 800, 99);
    const double u_opt = monte_carlo_average_rates(res.policy, pr.stats, pr.pilots, eval).sum();
    const double u_init = monte_carlo_average_rates(init, pr.stats, pr.pilots, eval).sum();
    const ControlPolicy eq = equal_power_policy(pr.d, RVec::Zero(pr.d.n_phases()));
    const double u_eq = monte_carlo_average_rates(eq, pr.stats, pr.pilots, eval).sum();
    CHECK(u_opt > u_init);
    CHECK(u_opt > u_eq);
}

TEST_CASE("zero-probability state still receives finite updates")
{
    Problem pr;
    ControlPolicy init = initialize_policy(pr.d, pr.stats, 4);
    init.q = (RVec(2) << 1.0, 0.0).finished();
    SscaOptions opt;
    opt.n_iters = 5;
    opt.mc_every = 0;
    const SscaResult res = ssca_optimize(pr.stats, pr.pilots, UtilitySpec::proportional_fairness(1e-3),
                                         StepSchedule{}, init, opt);
    CHECK(stack_states(res.policy.states).allFinite());
    CHECK(res.policy.q.allFinite());
    CHECK(res.state.r_hat.allFinite());
    CHECK(res.policy.feasibility_residual(pr.d.P_max) <= 1e-9);
}

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

#include "rcshp/ssca.hpp"
#include "rcshp/kernels.hpp"
#include "rcshp/pipeline.hpp"
#include "rcshp/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace rcshp
{

void StepSchedule::validate() const
{
    if (!(rho_exponent > 0.5 && rho_exponent < 1.0))
        throw ConfigError("step schedule: rho_exponent must lie in (0.5, 1)");
    if (!(gamma_exponent > rho_exponent && gamma_exponent <= 1.0))
        throw ConfigError("step schedule: gamma_exponent must lie in (rho_exponent, 1]");
    if (!(tau_q > 0.0) || !(tau_gamma > 0.0))
        throw ConfigError("step schedule: tau_q and tau_gamma must be positive");
}

double StepSchedule::rho(int t) const { return std::pow(t + 1.0, -rho_exponent); }
double StepSchedule::gamma(int t) const { return std::pow(t + 1.0, -gamma_exponent); }

SurrogateState SurrogateState::zeros(const SystemDims &dims, int L)
{
    return {RMat::Zero(dims.K, L), RVec::Zero(static_cast<Eigen::Index>(L) * dims.state_size()), 0};
}

namespace
{

void check_rho(double rho_t)
{
    if (!(rho_t > 0.0 && rho_t <= 1.0))
        throw ConfigError("surrogate update: rho_t must lie in (0, 1]");
}

} // namespace

RMat update_rate_surrogate(const SurrogateState &state, const ControlPolicy &policy,
                           const std::vector<ChannelSample> &batch, const ChannelStats &stats,
                           const PilotMatrix &pilots, double rho_t, CsiMode csi_mode, Backend backend)
{
    check_rho(rho_t);
    if (batch.empty())
        throw DataError("update_rate_surrogate: empty batch");
    RMat r_hat = (1.0 - rho_t) * state.r_hat;
    for (int l = 0; l < policy.L(); ++l)
    {
        const StateContext ctx = make_state_context(policy.states[l], stats, pilots, csi_mode);
        const RMat rates = kernels::batch_rates(ctx, batch, backend);
        RVec mean = RVec::Zero(rates.rows());
        for (Eigen::Index i = 0; i < rates.cols(); ++i)
            mean += rates.col(i);
        r_hat.col(l) += rho_t * (mean / static_cast<double>(rates.cols()));
    }
    return r_hat;
}

RVec update_gradient_surrogate(const SurrogateState &state, const ControlPolicy &policy,
                               const std::vector<ChannelSample> &batch, const ChannelStats &stats,
                               const PilotMatrix &pilots, double rho_t, const UtilitySpec &utility,
                               CsiMode csi_mode, Backend backend)
{
    check_rho(rho_t);
    const SystemDims &d = stats.dims;
    const int block = d.state_size();
    const RVec grad_u = utility_gradient(state.r_hat * policy.q, utility);
    RVec f = (1.0 - rho_t) * state.f_gamma;
    for (int l = 0; l < policy.L(); ++l)
    {
        const double ql = policy.q(l);
        if (ql == 0.0)
            continue;
        const StateContext ctx = make_state_context(policy.states[l], stats, pilots, csi_mode);
        const kernels::BatchGradient g = kernels::batch_gradients(ctx, batch, backend);
        f.segment(l * block, d.n_phases()) += rho_t * ql * (g.mean_d_theta * grad_u);
        f.segment(l * block + d.n_phases(), d.K) += rho_t * ql * (g.mean_d_p * grad_u);
    }
    return f;
}

RVec project_simplex(const RVec &v, double total)
{
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double shift = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
    {
        cumsum += u[j];
        const double candidate = (cumsum - total) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0.0)
            shift = candidate;
    }
    return (v.array() - shift).cwiseMax(0.0).matrix();
}

RVec project_power(const RVec &v, double budget)
{
    RVec clipped = v.cwiseMax(0.0);
    if (clipped.sum() <= budget)
        return clipped;
    return project_simplex(v, budget);
}

namespace
{

RVec q_gradient(const RMat &r_hat, const RVec &q_t, const UtilitySpec &u, double tau, const RVec &q)
{
    const RVec r = (r_hat * q).cwiseMax(0.0);
    return r_hat.transpose() * utility_gradient(r, u) - 2.0 * tau * (q - q_t);
}

} // namespace

double q_subproblem_residual(const RMat &r_hat, const RVec &q_t, const UtilitySpec &utility,
                             double tau_q, const RVec &q)
{
    const RVec g = q_gradient(r_hat, q_t, utility, tau_q, q);
    return (q - project_simplex(q + g)).norm();
}

QSolution solve_q_subproblem(const RMat &r_hat, const RVec &q_t, const UtilitySpec &utility,
                             double tau_q, int max_iters)
{
    const Eigen::Index L = r_hat.cols();
    if (q_t.size() != L)
        throw DataError("solve_q_subproblem: q_t must have one entry per state");
    if (!(tau_q > 0.0))
        throw ConfigError("solve_q_subproblem: tau_q must be positive");
    if (L == 1)
        return {RVec::Ones(1), 0.0, 0};

    constexpr double tol = 1e-10;
    RVec q = project_simplex(q_t);
    RVec g = q_gradient(r_hat, q_t, utility, tau_q, q);
    double step = 1.0 / (2.0 * tau_q);
    for (int it = 0; it < max_iters; ++it)
    {
        const double residual = (q - project_simplex(q + g)).norm();
        if (residual <= tol)
            return {q, residual, it};

        // Backtrack until the step is below the inverse of the local
        // gradient Lipschitz estimate. Gradient differences do not suffer
        // the cancellation of objective differences near the optimum.
        for (int bt = 0; bt < 80; ++bt)
        {
            const RVec cand = project_simplex(q + step * g);
            const RVec g_cand = q_gradient(r_hat, q_t, utility, tau_q, cand);
            const double moved = (cand - q).norm();
            if (step * (g_cand - g).norm() <= moved)
            {
                q = cand;
                g = g_cand;
                break;
            }
            step *= 0.5;
        }
        step *= 2.0;
    }
    const double residual = q_subproblem_residual(r_hat, q_t, utility, tau_q, q);
    if (residual <= 1e-8)
        return {q, residual, max_iters};
    throw NumericalError("solve_q_subproblem: no convergence after " + std::to_string(max_iters) +
                         " iterations (residual " + std::to_string(residual) + ")");
}

std::vector<ControlVariable> solve_gamma_subproblems(const RVec &f_gamma,
                                                     const std::vector<ControlVariable> &gamma_t,
                                                     double tau_gamma, double P_max,
                                                     ThetaProjection projection)
{
    if (!(tau_gamma > 0.0))
        throw ConfigError("solve_gamma_subproblems: tau_gamma must be positive");
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<ControlVariable> out;
    out.reserve(gamma_t.size());
    Eigen::Index offset = 0;
    for (const auto &g : gamma_t)
    {
        const Eigen::Index nt = g.theta.size();
        const Eigen::Index np = g.power.size();
        if (offset + nt + np > f_gamma.size())
            throw DataError("solve_gamma_subproblems: gradient shorter than the stacked states");
        ControlVariable sol;
        sol.theta = g.theta + f_gamma.segment(offset, nt) / (2.0 * tau_gamma);
        if (projection == ThetaProjection::box_clip)
        {
            sol.theta = sol.theta.cwiseMax(0.0).cwiseMin(two_pi);
        }
        else
        {
            for (Eigen::Index i = 0; i < nt; ++i)
            {
                double w = std::fmod(sol.theta(i), two_pi);
                sol.theta(i) = w < 0.0 ? w + two_pi : w;
            }
        }
        sol.power = project_power(g.power + f_gamma.segment(offset + nt, np) / (2.0 * tau_gamma), P_max);
        out.push_back(std::move(sol));
        offset += nt + np;
    }
    return out;
}

RVec average_iterates(const RVec &current, const RVec &solution, double gamma_t)
{
    if (!(gamma_t > 0.0 && gamma_t <= 1.0))
        throw ConfigError("average_iterates: gamma_t must lie in (0, 1]");
    if (gamma_t == 1.0)
        return solution;
    return (1.0 - gamma_t) * current + gamma_t * solution;
}

std::vector<ControlVariable> average_iterates(const std::vector<ControlVariable> &current,
                                              const std::vector<ControlVariable> &solution,
                                              double gamma_t)
{
    if (current.size() != solution.size())
        throw DataError("average_iterates: state count mismatch");
    std::vector<ControlVariable> out(current.size());
    for (std::size_t l = 0; l < current.size(); ++l)
    {
        out[l].theta = average_iterates(current[l].theta, solution[l].theta, gamma_t);
        out[l].power = average_iterates(current[l].power, solution[l].power, gamma_t);
    }
    return out;
}

RVec stack_states(const std::vector<ControlVariable> &states)
{
    Eigen::Index n = 0;
    for (const auto &s : states)
        n += s.theta.size() + s.power.size();
    RVec out(n);
    Eigen::Index off = 0;
    for (const auto &s : states)
    {
        out.segment(off, s.theta.size()) = s.theta;
        off += s.theta.size();
        out.segment(off, s.power.size()) = s.power;
        off += s.power.size();
    }
    return out;
}

RVec eigen_phases(const CMat &covariance, int S)
{
    const Eigen::Index M = covariance.rows();
    Eigen::SelfAdjointEigenSolver<CMat> eig(covariance);
    const double two_pi = 2.0 * std::numbers::pi;
    RVec theta(M * S);
    for (int j = 0; j < S; ++j)
    {
        // eigenvalues ascend; column M-1-j is the j-th strongest
        const auto v = eig.eigenvectors().col(M - 1 - j);
        for (Eigen::Index i = 0; i < M; ++i)
        {
            double a = std::arg(v(i));
            if (a < 0.0)
                a += two_pi;
            theta(j * M + i) = std::min(a, two_pi);
        }
    }
    return theta;
}

ControlPolicy initialize_policy(const SystemDims &dims, const ChannelStats &stats, std::uint64_t seed)
{
    dims.validate();
    Rng rng(derive_seed(seed, 0x1a17));
    std::vector<int> perm(dims.K);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    // K > S: round-robin groups of S users. K <= S: state 0 serves every
    // user and state l drops l of them, so the states start out distinct.
    const int group = std::min(dims.S, dims.K);
    ControlPolicy policy;
    policy.q = RVec::Constant(dims.L, 1.0 / dims.L);
    for (int l = 0; l < dims.L; ++l)
    {
        const int size = dims.K > dims.S ? group : std::max(1, dims.K - l);
        const int start = dims.K > dims.S ? l * group : l;
        ControlVariable cv;
        cv.power = RVec::Zero(dims.K);
        CMat cov = CMat::Zero(dims.M, dims.M);
        for (int j = 0; j < size; ++j)
        {
            const int k = perm[(start + j) % dims.K];
            cov += stats.covariances[k];
            cv.power(k) = dims.P_max / size;
        }
        cv.theta = eigen_phases(cov, dims.S);
        policy.states.push_back(std::move(cv));
    }
    return policy;
}

SscaResult ssca_optimize(const ChannelStats &stats, const PilotMatrix &pilots, const UtilitySpec &utility,
                         const StepSchedule &schedule, const ControlPolicy &init, const SscaOptions &options)
{
    schedule.validate();
    utility.validate();
    const SystemDims &d = stats.dims;
    init.check_feasible(d.P_max);
    if (options.batch_size < 1 || options.n_iters < 0)
        throw ConfigError("ssca_optimize: batch_size must be >= 1 and n_iters >= 0");

    const int L = init.L();
    const int block = d.state_size();
    const ChannelSampler sampler(stats);

    std::vector<ChannelSample> held_out;
    if (options.mc_every > 0 && options.mc_samples > 0)
        held_out = sample_channels(stats, options.mc_samples, options.mc_seed);

    SscaResult res{init, {}, SurrogateState::zeros(d, L)};
    ControlPolicy &policy = res.policy;
    SurrogateState &state = res.state;
    std::vector<ChannelSample> batch(options.batch_size);

    for (int t = 0; t < options.n_iters; ++t)
    {
        const double rho = schedule.rho(t);
        const double gam = schedule.gamma(t);

        // Step 1: fresh realizations
        const std::uint64_t iter_seed = derive_seed(options.seed, static_cast<std::uint64_t>(t));
        for (int i = 0; i < options.batch_size; ++i)
            batch[i] = sampler.draw(iter_seed, static_cast<std::uint64_t>(i));

        // Step 2: recursive surrogates, one forward/derivative pass per state
        std::vector<kernels::BatchGradient> grads(L);
        RMat r_hat = (1.0 - rho) * state.r_hat;
        for (int l = 0; l < L; ++l)
        {
            const StateContext ctx = make_state_context(policy.states[l], stats, pilots, options.csi_mode);
            if (policy.q(l) > 0.0)
            {
                grads[l] = kernels::batch_gradients(ctx, batch, options.backend);
            }
            else
            {
                const RMat rates = kernels::batch_rates(ctx, batch, options.backend);
                RVec mean = RVec::Zero(d.K);
                for (Eigen::Index i = 0; i < rates.cols(); ++i)
                    mean += rates.col(i);
                grads[l].mean_rates = mean / static_cast<double>(rates.cols());
            }
            r_hat.col(l) += rho * grads[l].mean_rates;
        }
        state.r_hat = r_hat;
        const RVec r_bar_hat = state.r_hat * policy.q;
        const RVec grad_u = utility_gradient(r_bar_hat, utility);
        RVec f = (1.0 - rho) * state.f_gamma;
        for (int l = 0; l < L; ++l)
        {
            const double ql = policy.q(l);
            if (ql == 0.0)
                continue;
            f.segment(l * block, d.n_phases()) += rho * ql * (grads[l].mean_d_theta * grad_u);
            f.segment(l * block + d.n_phases(), d.K) += rho * ql * (grads[l].mean_d_p * grad_u);
        }
        state.f_gamma = f;
        state.t = t;

        // Steps 3a/3b
        const QSolution q_bar = solve_q_subproblem(state.r_hat, policy.q, utility, schedule.tau_q,
                                                   options.q_max_iters);
        // Steps 4a/4b
        const std::vector<ControlVariable> gamma_bar =
            solve_gamma_subproblems(state.f_gamma, policy.states, schedule.tau_gamma, d.P_max,
                                    options.theta_projection);

        TraceRecord rec;
        rec.iter = t;
        rec.surrogate_utility = utility_value(r_bar_hat.cwiseMax(0.0), utility);
        rec.step_norm_q = (q_bar.q - policy.q).norm();
        rec.step_norm_gamma = (stack_states(gamma_bar) - stack_states(policy.states)).norm();

        policy.q = average_iterates(policy.q, q_bar.q, gam);
        policy.states = average_iterates(policy.states, gamma_bar, gam);
        rec.feasibility_residual = policy.feasibility_residual(d.P_max);

        rec.mc_utility = std::numeric_limits<double>::quiet_NaN();
        if (!held_out.empty() && (t % options.mc_every == 0 || t + 1 == options.n_iters))
        {
            const RVec r = monte_carlo_average_rates(policy, stats, pilots, held_out, options.csi_mode,
                                                     options.backend);
            rec.mc_utility = utility_value(r, utility);
        }
        res.trace.records.push_back(rec);
    }
    return res;
}

} // namespace rcshp

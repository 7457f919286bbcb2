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

#ifndef RCSHP_SSCA_HPP
#define RCSHP_SSCA_HPP

#include "rcshp/channel.hpp"
#include "rcshp/estimation.hpp"
#include "rcshp/precoding.hpp"
#include "rcshp/rate_utility.hpp"
#include "rcshp/types.hpp"

#include <cstdint>
#include <vector>

namespace rcshp
{

/// rho_t = (t+1)^-rho_exponent weights the recursive surrogates,
/// gamma_t = (t+1)^-gamma_exponent averages the iterates.
struct StepSchedule
{
    double rho_exponent = 0.9;
    double gamma_exponent = 1.0;
    double tau_q = 1.0;
    double tau_gamma = 0.05;

    /// Rejects schedules outside 0.5 < rho_exponent < gamma_exponent <= 1
    /// or with non-positive proximal weights.
    void validate() const;

    double rho(int t) const;
    double gamma(int t) const;
};

/// Recursive estimates of the per-state rates and of the utility gradient.
struct SurrogateState
{
    RMat r_hat;   ///< K x L
    RVec f_gamma; ///< L (MS + K)
    int t = 0;

    static SurrogateState zeros(const SystemDims &dims, int L);
};

struct TraceRecord
{
    int iter = 0;
    double surrogate_utility = 0.0;
    double mc_utility = 0.0; ///< NaN when not evaluated at this iteration
    double step_norm_gamma = 0.0;
    double step_norm_q = 0.0;
    double feasibility_residual = 0.0;
};

struct OptimizerTrace
{
    std::vector<TraceRecord> records;
};

enum class ThetaProjection
{
    box_clip, ///< Euclidean projection onto [0, 2 pi]
    wrap      ///< reduce modulo 2 pi
};

struct SscaOptions
{
    int n_iters = 100;
    int batch_size = 9;
    std::uint64_t seed = 1;
    CsiMode csi_mode = CsiMode::estimated;
    ThetaProjection theta_projection = ThetaProjection::box_clip;
    Backend backend = Backend::openmp;
    int q_max_iters = 10000;
    int mc_every = 10;     ///< 0 disables the held-out utility estimate
    int mc_samples = 200;
    std::uint64_t mc_seed = 0x5eed;
};

struct SscaResult
{
    ControlPolicy policy;
    OptimizerTrace trace;
    SurrogateState state;
};

struct QSolution
{
    RVec q;
    double residual = 0.0;
    int iterations = 0;
};

/// r_hat <- (1 - rho) r_hat + rho * batch mean of the per-state rates.
RMat update_rate_surrogate(const SurrogateState &state, const ControlPolicy &policy,
                           const std::vector<ChannelSample> &batch, const ChannelStats &stats,
                           const PilotMatrix &pilots, double rho_t,
                           CsiMode csi_mode = CsiMode::estimated, Backend backend = Backend::openmp);

/// f <- (1 - rho) f + rho * batch mean of J_Gamma grad U(r_hat q), with the
/// gradient of U taken at the current (already updated) rate surrogate.
RVec update_gradient_surrogate(const SurrogateState &state, const ControlPolicy &policy,
                               const std::vector<ChannelSample> &batch, const ChannelStats &stats,
                               const PilotMatrix &pilots, double rho_t, const UtilitySpec &utility,
                               CsiMode csi_mode = CsiMode::estimated,
                               Backend backend = Backend::openmp);

/// Euclidean projection onto {x >= 0, sum x = total}.
RVec project_simplex(const RVec &v, double total = 1.0);

/// Euclidean projection onto {p >= 0, sum p <= budget}.
RVec project_power(const RVec &v, double budget);

/// argmax over the simplex of U(r_hat q) - tau_q ||q - q_t||^2.
QSolution solve_q_subproblem(const RMat &r_hat, const RVec &q_t, const UtilitySpec &utility,
                             double tau_q, int max_iters = 10000);

/// Projected-gradient stationarity residual of the q subproblem.
double q_subproblem_residual(const RMat &r_hat, const RVec &q_t, const UtilitySpec &utility,
                             double tau_q, const RVec &q);

/// Closed-form maximizers P[Gamma_t(l) + f_l / (2 tau)] of the per-state
/// proximal linear subproblems.
std::vector<ControlVariable> solve_gamma_subproblems(
    const RVec &f_gamma, const std::vector<ControlVariable> &gamma_t, double tau_gamma, double P_max,
    ThetaProjection projection = ThetaProjection::box_clip);

RVec average_iterates(const RVec &current, const RVec &solution, double gamma_t);

std::vector<ControlVariable> average_iterates(const std::vector<ControlVariable> &current,
                                              const std::vector<ControlVariable> &solution,
                                              double gamma_t);

/// Flattens [theta(1); p(1); ...] in the Jacobian row order.
RVec stack_states(const std::vector<ControlVariable> &states);

ControlPolicy initialize_policy(const SystemDims &dims, const ChannelStats &stats, std::uint64_t seed);

/// Phases of the top-S eigenvectors of a Hermitian matrix, in [0, 2 pi).
RVec eigen_phases(const CMat &covariance, int S);

SscaResult ssca_optimize(const ChannelStats &stats, const PilotMatrix &pilots,
                         const UtilitySpec &utility, const StepSchedule &schedule,
                         const ControlPolicy &init, const SscaOptions &options);

} // namespace rcshp

#endif

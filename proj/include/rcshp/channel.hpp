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

#ifndef RCSHP_CHANNEL_HPP
#define RCSHP_CHANNEL_HPP

#include "rcshp/types.hpp"

#include <cstdint>
#include <vector>

namespace rcshp
{

/// Per-user channel covariances C_k (M x M, Hermitian PSD).
struct ChannelStats
{
    SystemDims dims;
    std::vector<CMat> covariances;

    /// Checks count, shape, Hermitian symmetry and PSD-ness (DataError).
    void validate() const;
};

/// Geometry-based model: N_p Laplacian-distributed paths per user.
struct GeometryModelParams
{
    int n_paths = 8;
    double angular_spread_deg = 10.0;
    double gain_db_low = -10.0;
    double gain_db_high = 10.0;

    void validate() const;
};

/// Clustered model: clusters of uniform angular power in xi = sin(theta).
struct Cost2100ModelParams
{
    int n_clusters = 3;
    int clusters_per_user = 2;
    double cluster_width = 0.2;
    int grid_points = 2048;
    double gain_db_low = -10.0;
    double gain_db_high = 10.0;

    void validate() const;
};

/// One channel realization together with the pilot-phase noise.
struct ChannelSample
{
    CMat H; ///< K x M, row k is h_k^H
    CMat N; ///< K x T_p, row k is n_k^T
};

/// ULA response, entry m = exp(j pi m sin(phi)).
CVec steering_vector(double phi, int M);

/// ULA response in the normalized angle xi, entry m = exp(j pi m xi).
CVec steering_vector_xi(double xi, int M);

ChannelStats build_geometry_stats(const SystemDims &dims, const GeometryModelParams &params,
                                  std::uint64_t seed);

ChannelStats build_cost2100_stats(const SystemDims &dims, const Cost2100ModelParams &params,
                                  std::uint64_t seed);

/// Number of eigenvalues above rel_tol * lambda_max.
int numerical_rank(const CMat &C, double rel_tol);

/// Draws CN(0, C_k) channels from a factorized covariance. Sample i of a
/// batch depends only on (seed, i), never on thread count or call order.
class ChannelSampler
{
public:
    explicit ChannelSampler(const ChannelStats &stats);

    ChannelSample draw(std::uint64_t seed, std::uint64_t index) const;

    const SystemDims &dims() const { return dims_; }

private:
    SystemDims dims_;
    std::vector<CMat> factors_; // M x r_k, C_k = factor * factor^H
};

std::vector<ChannelSample> sample_channels(const ChannelStats &stats, int count, std::uint64_t seed);

} // namespace rcshp

#endif

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

#include "rcshp/channel.hpp"
#include "rcshp/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace rcshp
{

namespace
{

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double uniform_gain(Rng &rng, double low_db, double high_db)
{
    std::uniform_real_distribution<double> u(low_db, high_db);
    return db_to_linear(low_db == high_db ? low_db : u(rng));
}

// Reflects an angle back into [-pi/2, pi/2).
double reflect_half_circle(double phi)
{
    const double half = std::numbers::pi / 2.0;
    for (int guard = 0; guard < 64 && (phi < -half || phi >= half); ++guard)
        phi = phi >= half ? std::numbers::pi - phi : -std::numbers::pi - phi;
    return std::clamp(phi, -half, std::nextafter(half, 0.0));
}

double laplace(Rng &rng, double scale)
{
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    double v = u(rng);
    while (v == -0.5)
        v = u(rng);
    return -scale * (v < 0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::abs(v));
}

void hermitize(CMat &C) { C = (0.5 * (C + C.adjoint())).eval(); }

} // namespace

void GeometryModelParams::validate() const
{
    if (n_paths < 1)
        throw ConfigError("geometry model: n_paths must be >= 1");
    if (!(angular_spread_deg > 0.0))
        throw ConfigError("geometry model: angular spread must be positive");
    if (gain_db_low > gain_db_high)
        throw ConfigError("geometry model: gain range low > high");
}

void Cost2100ModelParams::validate() const
{
    if (n_clusters < 1 || clusters_per_user < 1 || clusters_per_user > n_clusters)
        throw ConfigError("cost2100 model: need 1 <= clusters_per_user <= n_clusters");
    if (!(cluster_width > 0.0) || cluster_width > 2.0)
        throw ConfigError("cost2100 model: cluster_width must lie in (0, 2]");
    if (grid_points < 64)
        throw ConfigError("cost2100 model: grid_points must be >= 64");
    if (gain_db_low > gain_db_high)
        throw ConfigError("cost2100 model: gain range low > high");
}

void ChannelStats::validate() const
{
    dims.validate();
    if (static_cast<int>(covariances.size()) != dims.K)
        throw DataError("ChannelStats: expected one covariance per user");
    for (std::size_t k = 0; k < covariances.size(); ++k)
    {
        const CMat &C = covariances[k];
        if (C.rows() != dims.M || C.cols() != dims.M)
            throw DataError("ChannelStats: covariance " + std::to_string(k) + " is not M x M");
        if (!C.allFinite())
            throw DataError("ChannelStats: covariance " + std::to_string(k) + " has non-finite entries");
        const double norm = C.norm();
        if ((C - C.adjoint()).norm() > 1e-10 * std::max(norm, 1e-300))
            throw DataError("ChannelStats: covariance " + std::to_string(k) + " is not Hermitian");
        if (norm == 0.0)
            continue;
        Eigen::SelfAdjointEigenSolver<CMat> eig(C, Eigen::EigenvaluesOnly);
        const double trace = C.trace().real();
        if (eig.eigenvalues().minCoeff() < -1e-8 * std::abs(trace) / dims.M)
            throw DataError("ChannelStats: covariance " + std::to_string(k) + " is not PSD");
    }
}

CVec steering_vector(double phi, int M) { return steering_vector_xi(std::sin(phi), M); }

CVec steering_vector_xi(double xi, int M)
{
    CVec a(M);
    for (int m = 0; m < M; ++m)
        a(m) = std::polar(1.0, std::numbers::pi * m * xi);
    return a;
}

ChannelStats build_geometry_stats(const SystemDims &dims, const GeometryModelParams &params,
                                  std::uint64_t seed)
{
    dims.validate();
    params.validate();

    const double half = std::numbers::pi / 2.0;
    // standard deviation of the Laplacian equals the angular spread
    const double scale = params.angular_spread_deg * std::numbers::pi / 180.0 / std::sqrt(2.0);

    ChannelStats stats{dims, {}};
    stats.covariances.reserve(dims.K);
    for (int k = 0; k < dims.K; ++k)
    {
        Rng rng(derive_seed(seed, 0x6e0, k));
        const double gain = uniform_gain(rng, params.gain_db_low, params.gain_db_high);
        std::uniform_real_distribution<double> center_dist(-half, half);
        const double center = center_dist(rng);

        std::exponential_distribution<double> expo(1.0);
        RVec var(params.n_paths);
        RVec angle(params.n_paths);
        for (int i = 0; i < params.n_paths; ++i)
        {
            angle(i) = reflect_half_circle(center + laplace(rng, scale));
            var(i) = expo(rng);
        }
        var *= gain / var.sum();

        CMat C = CMat::Zero(dims.M, dims.M);
        for (int i = 0; i < params.n_paths; ++i)
        {
            const CVec a = steering_vector(angle(i), dims.M);
            C.noalias() += var(i) * (a * a.adjoint());
        }
        hermitize(C);
        stats.covariances.push_back(std::move(C));
    }
    return stats;
}

ChannelStats build_cost2100_stats(const SystemDims &dims, const Cost2100ModelParams &params,
                                  std::uint64_t seed)
{
    dims.validate();
    params.validate();

    Rng cluster_rng(derive_seed(seed, 0xc1));
    // lower cluster edges; intervals stay inside [-1, 1)
    std::uniform_real_distribution<double> edge_dist(-1.0, 1.0 - params.cluster_width);
    std::vector<double> edges(params.n_clusters);
    for (double &e : edges)
        e = params.cluster_width >= 2.0 ? -1.0 : edge_dist(cluster_rng);

    // midpoint quadrature on [-1, 1)
    const int G = params.grid_points;
    const double dxi = 2.0 / G;
    CMat grid_steering(dims.M, G);
    RVec xi(G);
    for (int g = 0; g < G; ++g)
    {
        xi(g) = -1.0 + (g + 0.5) * dxi;
        grid_steering.col(g) = steering_vector_xi(xi(g), dims.M);
    }

    ChannelStats stats{dims, {}};
    stats.covariances.reserve(dims.K);
    for (int k = 0; k < dims.K; ++k)
    {
        Rng rng(derive_seed(seed, 0xc2, k));
        const double gain = uniform_gain(rng, params.gain_db_low, params.gain_db_high);

        std::vector<int> order(params.n_clusters);
        for (int c = 0; c < params.n_clusters; ++c)
            order[c] = c;
        std::shuffle(order.begin(), order.end(), rng);

        RVec asf = RVec::Zero(G);
        for (int c = 0; c < params.clusters_per_user; ++c)
        {
            const double lo = edges[order[c]];
            for (int g = 0; g < G; ++g)
                if (xi(g) >= lo && xi(g) < lo + params.cluster_width)
                    asf(g) = 1.0;
        }

        CMat C = grid_steering * (asf * dxi).asDiagonal() * grid_steering.adjoint();
        hermitize(C);
        const double trace = C.trace().real();
        if (trace > 0.0)
            C *= dims.M * gain / trace;
        stats.covariances.push_back(std::move(C));
    }
    return stats;
}

int numerical_rank(const CMat &C, double rel_tol)
{
    Eigen::SelfAdjointEigenSolver<CMat> eig(C, Eigen::EigenvaluesOnly);
    const RVec &ev = eig.eigenvalues();
    const double top = ev.maxCoeff();
    if (!(top > 0.0))
        return 0;
    return static_cast<int>((ev.array() > rel_tol * top).count());
}

ChannelSampler::ChannelSampler(const ChannelStats &stats) : dims_(stats.dims)
{
    stats.validate();
    factors_.reserve(stats.covariances.size());
    for (const CMat &C : stats.covariances)
    {
        Eigen::SelfAdjointEigenSolver<CMat> eig(C);
        const RVec ev = eig.eigenvalues().cwiseMax(0.0);
        const double top = ev.size() ? ev.maxCoeff() : 0.0;
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (ev(i) > 0.0 && ev(i) > 1e-14 * top)
                keep.push_back(i);
        CMat factor(dims_.M, static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j)
            factor.col(j) = eig.eigenvectors().col(keep[j]) * std::sqrt(ev(keep[j]));
        factors_.push_back(std::move(factor));
    }
}

ChannelSample ChannelSampler::draw(std::uint64_t seed, std::uint64_t index) const
{
    Rng rng(derive_seed(seed, index));
    ChannelSample s{CMat::Zero(dims_.K, dims_.M), CMat(dims_.K, dims_.T_p)};
    for (int k = 0; k < dims_.K; ++k)
    {
        const CMat &factor = factors_[k];
        const CMat w = complex_normal_matrix(rng, factor.cols(), 1);
        if (factor.cols() > 0)
            s.H.row(k) = (factor * w).adjoint();
    }
    s.N = complex_normal_matrix(rng, dims_.K, dims_.T_p);
    return s;
}

std::vector<ChannelSample> sample_channels(const ChannelStats &stats, int count, std::uint64_t seed)
{
    if (count < 1)
        throw ConfigError("sample_channels: count must be >= 1");
    const ChannelSampler sampler(stats);
    std::vector<ChannelSample> out(count);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < count; ++i)
        out[i] = sampler.draw(seed, static_cast<std::uint64_t>(i));
    return out;
}

} // namespace rcshp

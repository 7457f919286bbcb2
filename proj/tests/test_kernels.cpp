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

#include "rcshp/kernels.hpp"
#include "rcshp/pipeline.hpp"

using namespace rcshp;

TEST_CASE("serial and OpenMP kernels agree bitwise")
{
    const SystemDims d = test::small_dims(8, 2, 3, 2, 1);
    const ChannelStats st = build_geometry_stats(d, GeometryModelParams{}, 21);
    const PilotMatrix pil = generate_pilots(d.T_p, d.S, d.P_max, 22);
    const auto samples = sample_channels(st, 37, 23);
    for (CsiMode mode : {CsiMode::estimated, CsiMode::perfect})
    {
        const StateContext ctx = make_state_context(test::random_state(d, 24), st, pil, mode);
        const RMat a = kernels::serial::batch_rates(ctx, samples);
        const RMat b = kernels::omp::batch_rates(ctx, samples);
        REQUIRE(a.rows() == d.K);
        REQUIRE(a.cols() == 37);
        CHECK((a.array() == b.array()).all());
        CHECK((kernels::batch_rates(ctx, samples, Backend::serial).array() == a.array()).all());

        const auto gs = kernels::serial::batch_gradients(ctx, samples);
        const auto go = kernels::omp::batch_gradients(ctx, samples);
        CHECK((gs.mean_rates.array() == go.mean_rates.array()).all());
        CHECK((gs.mean_d_theta.array() == go.mean_d_theta.array()).all());
        CHECK((gs.mean_d_p.array() == go.mean_d_p.array()).all());
        CHECK((gs.mean_rates - a.rowwise().mean()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("empty batch")
{
    const SystemDims d = test::small_dims(4, 2, 2, 2, 1);
    const ChannelStats st = build_geometry_stats(d, GeometryModelParams{}, 1);
    const PilotMatrix pil = generate_pilots(d.T_p, d.S, d.P_max, 2);
    const StateContext ctx = make_state_context(test::random_state(d, 3), st, pil, CsiMode::estimated);
    const std::vector<ChannelSample> none;
    CHECK(kernels::batch_rates(ctx, none, Backend::openmp).cols() == 0);
    CHECK_THROWS_AS(kernels::batch_gradients(ctx, none, Backend::serial), DataError);
    CHECK_THROWS_AS(kernels::batch_gradients(ctx, none, Backend::openmp), DataError);
}

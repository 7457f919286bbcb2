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

#include "rcshp/kernels.hpp"
#include "rcshp/precoding.hpp"
#include "rcshp/random.hpp"

#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

using namespace rcshp;

namespace
{

struct Fixture
{
    ChannelStats stats;
    PilotMatrix pilots;
    StateContext ctx;
    std::vector<ChannelSample> samples;

    Fixture(int M, int S, int K, int n)
    {
        SystemDims d;
        d.M = M;
        d.S = S;
        d.K = K;
        d.T_p = S;
        stats = build_geometry_stats(d, GeometryModelParams{}, 1);
        pilots = generate_pilots(d.T_p, d.S, d.P_max, 2);
        Rng rng(3);
        std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
        ControlVariable cv;
        cv.theta.resize(d.n_phases());
        for (auto &t : cv.theta)
            t = u(rng);
        cv.power = RVec::Constant(K, d.P_max / K);
        ctx = make_state_context(cv, stats, pilots, CsiMode::estimated);
        samples = sample_channels(stats, n, 4);
    }
};

template <Backend B>
void BM_batch_rates(benchmark::State &state)
{
    const Fixture fx(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                     static_cast<int>(state.range(1)), 64);
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::batch_rates(fx.ctx, fx.samples, B));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(fx.samples.size()));
}

template <Backend B>
void BM_batch_gradients(benchmark::State &state)
{
    const Fixture fx(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                     static_cast<int>(state.range(1)), 9);
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::batch_gradients(fx.ctx, fx.samples, B));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(fx.samples.size()));
}

} // namespace

BENCHMARK_TEMPLATE(BM_batch_rates, Backend::serial)->Args({16, 4})->Args({64, 8});
BENCHMARK_TEMPLATE(BM_batch_rates, Backend::openmp)->Args({16, 4})->Args({64, 8});
BENCHMARK_TEMPLATE(BM_batch_gradients, Backend::serial)->Args({16, 4})->Args({64, 8})->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_batch_gradients, Backend::openmp)->Args({16, 4})->Args({64, 8})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

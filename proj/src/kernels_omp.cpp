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
#include "rcshp/kernels.hpp"

#include <exception>
#include <mutex>

namespace rcshp::kernels
{

namespace detail
{
BatchGradient reduce(const std::vector<StateGradient> &parts, Eigen::Index n_phases, Eigen::Index K);
}

namespace omp
{

namespace
{

// Exceptions may not escape an OpenMP region; keep the first one and
// rethrow after the loop.
class ExceptionSlot
{
public:
    template <class Fn> void run(Fn &&fn)
    {
        try
        {
            fn();
        }
        catch (...)
        {
            std::lock_guard<std::mutex> lock(mu_);
            if (!err_)
                err_ = std::current_exception();
        }
    }
    void rethrow() const
    {
        if (err_)
            std::rethrow_exception(err_);
    }

private:
    std::mutex mu_;
    std::exception_ptr err_;
};

} // namespace

RMat batch_rates(const StateContext &ctx, std::span<const ChannelSample> samples)
{
    const Eigen::Index K = ctx.gamma.power.size();
    const long n = static_cast<long>(samples.size());
    RMat out(K, n);
    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < n; ++i)
        slot.run([&] { out.col(i) = run_pipeline(ctx, samples[i]).rates; });
    slot.rethrow();
    return out;
}

BatchGradient batch_gradients(const StateContext &ctx, std::span<const ChannelSample> samples)
{
    if (samples.empty())
        throw DataError("batch_gradients: empty sample batch");
    const long n = static_cast<long>(samples.size());
    std::vector<StateGradient> parts(samples.size());
    ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i)
        slot.run([&] { parts[i] = state_gradient(ctx, samples[i]); });
    slot.rethrow();
    return detail::reduce(parts, ctx.F.size(), ctx.gamma.power.size());
}

} // namespace omp

} // namespace rcshp::kernels

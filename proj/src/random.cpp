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

#include "rcshp/random.hpp"

#include <cmath>

namespace rcshp
{

namespace
{
// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z)
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return mix(mix(seed) ^ (stream * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    return derive_seed(derive_seed(seed, a), b);
}

cdouble complex_normal(Rng &rng)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

CMat complex_normal_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols)
{
    CMat out(rows, cols);
    // column-major fill order is part of the determinism contract
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            out(i, j) = complex_normal(rng);
    return out;
}

std::string to_string(CsiMode mode)
{
    return mode == CsiMode::perfect ? "perfect" : "estimated";
}

CsiMode csi_mode_from_string(const std::string &name)
{
    if (name == "perfect")
        return CsiMode::perfect;
    if (name == "estimated")
        return CsiMode::estimated;
    throw ConfigError("unknown csi_mode '" + name + "' (expected estimated|perfect)");
}

void SystemDims::validate() const
{
    if (M < 1 || S < 1 || K < 1 || T_p < 1 || L < 1 || T < 1)
        throw ConfigError("SystemDims: all counts must be >= 1");
    if (S > M)
        throw ConfigError("SystemDims: RF chains S must not exceed antennas M");
    if (!(P_max > 0.0) || !std::isfinite(P_max))
        throw ConfigError("SystemDims: P_max must be positive and finite");
}

} // namespace rcshp

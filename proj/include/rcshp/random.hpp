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

#ifndef RCSHP_RANDOM_HPP
#define RCSHP_RANDOM_HPP

#include "rcshp/types.hpp"

#include <cstdint>
#include <random>

namespace rcshp
{

using Rng = std::mt19937_64;

/// Mixes a base seed with a stream index so that sub-streams are
/// independent of the order in which they are consumed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Two-level derivation, e.g. (seed, iteration, sample).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Circularly-symmetric complex Gaussian with unit variance.
cdouble complex_normal(Rng &rng);

/// Fills a matrix with i.i.d. CN(0, 1) entries.
CMat complex_normal_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols);

} // namespace rcshp

#endif

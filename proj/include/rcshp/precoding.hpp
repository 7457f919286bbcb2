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

#ifndef RCSHP_PRECODING_HPP
#define RCSHP_PRECODING_HPP

#include "rcshp/types.hpp"

#include <vector>

namespace rcshp
{

/// One control state: analog phases (theta, length M*S, column-major over
/// F) and the per-user power allocation.
struct ControlVariable
{
    RVec theta;
    RVec power;

    /// Largest violation of theta in [0, 2 pi], p >= 0, sum(p) <= P_max.
    double feasibility_residual(double P_max) const;
};

/// L control states time-shared with probabilities q.
struct ControlPolicy
{
    std::vector<ControlVariable> states;
    RVec q;

    int L() const { return static_cast<int>(states.size()); }
    double feasibility_residual(double P_max) const;
    /// Throws DataError when the residual exceeds tol.
    void check_feasible(double P_max, double tol = 1e-9) const;
};

struct DigitalPrecoder
{
    CMat G;            ///< S x K, columns with ||F g_k|| = 1
    RVec norm_factors; ///< diagonal of the column normalization
};

/// Smallest column norm treated as nonzero by the normalization.
inline constexpr double kNormFloor = 1e-30;

/// [F]_{ij} = exp(j theta_{(j-1)M+i}) / sqrt(M).
CMat analog_from_phases(const RVec &theta, int M, int S);

/// Unnormalized virtual-uplink MMSE receiver (H^H P H + I)^{-1} H^H P.
CMat duality_core(const CMat &H_eff, const RVec &p);

/// Duality-based digital precoder with unit-norm F g_k columns.
///
/// For p_k > 0 the column direction is that of the core's column k; p_k
/// cancels in the normalization, so the same direction (the limit as
/// p_k -> 0+) is used for zero-power users and norm_factors(k) is 0.
DigitalPrecoder duality_digital_precoder(const CMat &H_eff, const RVec &p, const CMat &F);

/// Unnormalized RZF H^H (H H^H + alpha I)^{-1}.
CMat rzf_core(const CMat &H_eff, double alpha);

DigitalPrecoder rzf_digital_precoder(const CMat &H_eff, double alpha, const CMat &F);

} // namespace rcshp

#endif

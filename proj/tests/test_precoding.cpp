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

#include "rcshp/precoding.hpp"
#include "rcshp/random.hpp"

#include <cmath>
#include <numbers>

using namespace rcshp;

namespace
{

CMat random_channel(int K, int S, std::uint64_t seed)
{
    Rng rng(seed);
    return complex_normal_matrix(rng, K, S);
}

} // namespace

TEST_CASE("analog precoder layout and modulus")
{
    const int M = 4, S = 3;
    RVec theta(M * S);
    for (int i = 0; i < M * S; ++i)
        theta(i) = 0.1 * i;
    const CMat F = analog_from_phases(theta, M, S);
    for (int j = 0; j < S; ++j)
        for (int i = 0; i < M; ++i)
        {
            CHECK(std::abs(F(i, j)) == doctest::Approx(0.5));
            CHECK(std::arg(F(i, j)) == doctest::Approx(0.1 * (j * M + i)));
        }
    CHECK_THROWS_AS(analog_from_phases(theta, M, S + 1), DataError);
}

TEST_CASE("duality core against an explicit-inverse evaluation")
{
    const CMat H = random_channel(3, 4, 1);
    RVec p(3);
    p << 0.5, 2.0, 1.5;
    const CMat Pm = p.cast<cdouble>().asDiagonal();
    const CMat V = H.adjoint() * Pm * H + CMat::Identity(4, 4);
    const CMat expect = V.inverse() * H.adjoint() * Pm;
    CHECK(test::max_rel_diff(duality_core(H, p), expect) < 1e-12);
}

TEST_CASE("equal-power duality equals RZF with alpha = K / P_max")
{
    for (std::uint64_t s = 0; s < 20; ++s)
    {
        const int K = 2 + static_cast<int>(s % 3);
        const int S = 4;
        const double P_max = 1.0 + static_cast<double>(s);
        const CMat H = random_channel(K, S, 100 + s);
        const RVec p = RVec::Constant(K, P_max / K);
        const CMat G_dual = duality_core(H, p);
        CHECK(test::max_rel_diff(G_dual, rzf_core(H, K / P_max)) < 1e-10);

        const CMat F = analog_from_phases(test::random_state(test::small_dims(8, S, K), s).theta, 8, S);
        const DigitalPrecoder a = duality_digital_precoder(H, p, F);
        const DigitalPrecoder b = rzf_digital_precoder(H, K / P_max, F);
        CHECK(test::max_rel_diff(a.G, b.G) < 1e-10);
    }
}

TEST_CASE("digital precoder columns are normalized through F")
{
    const SystemDims d = test::small_dims(8, 3, 3);
    const ControlVariable g = test::random_state(d, 2);
    const CMat F = analog_from_phases(g.theta, d.M, d.S);
    const CMat H = random_channel(d.K, d.S, 7);
    const DigitalPrecoder pre = duality_digital_precoder(H, g.power, F);
    for (int k = 0; k < d.K; ++k)
    {
        CHECK((F * pre.G.col(k)).norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(pre.norm_factors(k) > 0.0);
    }
}

TEST_CASE("zero-power user keeps the limiting direction")
{
    const SystemDims d = test::small_dims(8, 3, 3);
    const CMat F = analog_from_phases(test::random_state(d, 4).theta, d.M, d.S);
    const CMat H = random_channel(d.K, d.S, 9);
    RVec p(3);
    p << 2.0, 0.0, 3.0;
    const DigitalPrecoder at_zero = duality_digital_precoder(H, p, F);
    CHECK(at_zero.norm_factors(1) == 0.0);
    CHECK((F * at_zero.G.col(1)).norm() == doctest::Approx(1.0));
    RVec p_eps = p;
    p_eps(1) = 1e-9;
    const DigitalPrecoder near = duality_digital_precoder(H, p_eps, F);
    CHECK((near.G - at_zero.G).cwiseAbs().maxCoeff() < 1e-7);
    p(0) = -1.0;
    CHECK_THROWS_AS(duality_digital_precoder(H, p, F), DataError);
    CHECK_THROWS_AS(rzf_digital_precoder(H, 0.0, F), DataError);
}

TEST_CASE("feasibility residuals")
{
    ControlVariable cv{RVec::Constant(4, 1.0), RVec::Constant(2, 2.0)};
    CHECK(cv.feasibility_residual(10.0) == 0.0);
    CHECK(cv.feasibility_residual(3.0) == doctest::Approx(1.0));
    cv.theta(2) = 2.0 * std::numbers::pi + 0.25;
    CHECK(cv.feasibility_residual(10.0) == doctest::Approx(0.25));
    cv.theta(2) = 0.0;
    cv.power(0) = -0.5;
    CHECK(cv.feasibility_residual(10.0) == doctest::Approx(0.5));

    ControlPolicy pol;
    pol.states = {ControlVariable{RVec::Zero(4), RVec::Zero(2)}, ControlVariable{RVec::Zero(4), RVec::Zero(2)}};
    pol.q = RVec::Constant(2, 0.5);
    CHECK_NOTHROW(pol.check_feasible(1.0));
    pol.q(0) = 0.7;
    CHECK_THROWS_AS(pol.check_feasible(1.0), DataError);
    pol.q = RVec::Ones(1);
    CHECK_THROWS_AS(pol.check_feasible(1.0), DataError);
}

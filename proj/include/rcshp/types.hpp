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

#ifndef RCSHP_TYPES_HPP
#define RCSHP_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rcshp
{

using cdouble = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// Per-user average (or instantaneous) rates in bits per channel use.
using RateVector = Eigen::VectorXd;

/// Invalid dimensions, parameters or configuration values.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Input data that violates a documented contract (shape, PSD, range).
class DataError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not deliver a result (singular system,
/// non-convergence).
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Which effective channel the digital precoder is computed from.
enum class CsiMode
{
    estimated, ///< LMMSE estimate from the pilot observation
    perfect    ///< true effective channel H F
};

/// Execution backend for the batched sample kernels.
enum class Backend
{
    serial, ///< reference loop, kept for testing
    openmp  ///< OpenMP parallel over samples
};

std::string to_string(CsiMode mode);
CsiMode csi_mode_from_string(const std::string &name);

/// System dimensions and power budget.
struct SystemDims
{
    int M = 16;          ///< antennas
    int S = 4;           ///< RF chains
    int K = 4;           ///< users
    int T_p = 4;         ///< pilot symbols
    int L = 2;           ///< control states
    int T = 20;          ///< symbols per slot
    double P_max = 10.0; ///< total transmit power (linear)

    /// Throws ConfigError on a violated invariant.
    void validate() const;

    int n_phases() const { return M * S; }
    int state_size() const { return M * S + K; }
};

} // namespace rcshp

#endif

// SPDX-License-Identifier: Apache-2.0
//
// nmce - channel estimation toolkit for NOMA mmWave massive MIMO downlinks
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

#ifndef NMCE_COMMON_HPP
#define NMCE_COMMON_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace nmce
{

using cxd = std::complex<double>;
using cxf = std::complex<float>;

// Row-major storage throughout: matrices serialize row by row.
using CMat = Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMatF = Eigen::Matrix<cxf, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;

/// Shape mismatch in a matrix chain; the message names the failing factor.
class DimensionError : public std::runtime_error
{
  public:
    explicit DimensionError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Gram matrix too ill-conditioned to invert (condition number above 1e12).
class SingularMatrixError : public std::runtime_error
{
  public:
    SingularMatrixError(const std::string &msg, Eigen::Index dimension)
        : std::runtime_error(msg + " (dimension " + std::to_string(dimension) + ")"), dim(dimension)
    {
    }
    Eigen::Index dim;
};

/// Raised when a training run produces a non-finite loss.
class TrainingDiverged : public std::runtime_error
{
  public:
    TrainingDiverged(const std::string &msg, int epoch_, int batch_)
        : std::runtime_error(msg + " (epoch " + std::to_string(epoch_) + ", batch " + std::to_string(batch_) + ")"),
          epoch(epoch_), batch(batch_)
    {
    }
    int epoch;
    int batch;
};

class ConfigError : public std::runtime_error
{
  public:
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace nmce

#endif

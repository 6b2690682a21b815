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

#ifndef NMCE_NUMERICS_HPP
#define NMCE_NUMERICS_HPP

#include "nmce/common.hpp"
#include "nmce/rng.hpp"

namespace nmce
{

/// Condition-number guard for Gram inverses. Above this, fail loudly.
constexpr double kGramConditionLimit = 1e12;

/// n x n unitary DFT matrix, entry (p,q) = exp(-j 2 pi p q / n) / sqrt(n).
CMat dft_matrix(Eigen::Index n);

/// Conjugate transpose.
CMat hermitian(const CMat &a);

enum class GramSide
{
    Left, ///< (A A^H)^{-1} A
    Right ///< A^H (A A^H)^{-1}
};

/// Applies the inverse Gram matrix of A to A itself. A must have full row
/// rank; a condition number of A A^H above kGramConditionLimit raises
/// SingularMatrixError carrying the Gram dimension.
CMat gram_inverse_apply(const CMat &a, GramSide side);

/// rows x cols matrix of i.i.d. CN(0, variance) entries, sampled row-major.
CMat sample_complex_gaussian(Rng &rng, Eigen::Index rows, Eigen::Index cols, double variance);

} // namespace nmce

#endif

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

#include "nmce/numerics.hpp"

#include <cmath>

namespace nmce
{

CMat dft_matrix(Eigen::Index n)
{
    if (n < 1)
        throw std::invalid_argument("dft_matrix: dimension must be at least 1");

    CMat u(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double step = -2.0 * M_PI / static_cast<double>(n);
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = 0; q < n; ++q)
        {
            // reduce p*q mod n before the trig call to keep the phase small
            const double phase = step * static_cast<double>((p * q) % n);
            u(p, q) = scale * cxd(std::cos(phase), std::sin(phase));
        }
    return u;
}

CMat hermitian(const CMat &a)
{
    return a.adjoint();
}

CMat gram_inverse_apply(const CMat &a, GramSide side)
{
    const Eigen::Index m = a.rows();
    if (m == 0)
        return side == GramSide::Left ? CMat(0, a.cols()) : CMat(a.cols(), 0);

    const CMat gram = a * a.adjoint();
    Eigen::SelfAdjointEigenSolver<CMat> es(gram);
    if (es.info() != Eigen::Success)
        throw SingularMatrixError("gram_inverse_apply: eigensolver failed on A A^H", m);

    const Eigen::VectorXd eig = es.eigenvalues(); // ascending
    const double lo = eig(0);
    const double hi = eig(m - 1);
    if (!(lo > 0.0) || hi / lo > kGramConditionLimit)
        throw SingularMatrixError("gram_inverse_apply: A A^H ill-conditioned", m);

    // (A A^H)^{-1} A through the eigenbasis of the Hermitian Gram matrix.
    const CMat left = es.eigenvectors() * eig.cwiseInverse().asDiagonal() * es.eigenvectors().adjoint() * a;
    return side == GramSide::Left ? left : CMat(left.adjoint());
}

CMat sample_complex_gaussian(Rng &rng, Eigen::Index rows, Eigen::Index cols, double variance)
{
    if (variance < 0.0)
        throw std::invalid_argument("sample_complex_gaussian: variance must be nonnegative");

    CMat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = rng.complex_gaussian(variance);
    return m;
}

} // namespace nmce

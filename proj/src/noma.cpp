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

#include "nmce/noma.hpp"
#include "nmce/numerics.hpp"

#include <algorithm>
#include <numeric>

namespace nmce
{

ClusterPlan cluster_users(const CMat &h)
{
    const Eigen::Index n = h.rows();
    if (n < 2 || n % 2 != 0)
        throw std::invalid_argument("cluster_users: user count must be even and at least 2");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::vector<double> gain(static_cast<std::size_t>(n));
    for (Eigen::Index u = 0; u < n; ++u)
        gain[static_cast<std::size_t>(u)] = h.row(u).norm();

    // descending gain, lower original index ranked stronger on ties
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return gain[static_cast<std::size_t>(a)] > gain[static_cast<std::size_t>(b)];
    });

    ClusterPlan plan;
    const Eigen::Index n_c = n / 2;
    plan.clusters.reserve(static_cast<std::size_t>(n_c));
    plan.permutation.assign(static_cast<std::size_t>(n), 0);
    for (Eigen::Index k = 0; k < n_c; ++k)
    {
        const Eigen::Index strong = order[static_cast<std::size_t>(k)];
        const Eigen::Index weak = order[static_cast<std::size_t>(n - 1 - k)];
        plan.clusters.emplace_back(strong, weak);
        plan.permutation[static_cast<std::size_t>(strong)] = 2 * k;
        plan.permutation[static_cast<std::size_t>(weak)] = 2 * k + 1;
    }
    return plan;
}

CMat clustered_matrix(const CMat &h, const ClusterPlan &plan)
{
    if (static_cast<Eigen::Index>(plan.permutation.size()) != h.rows())
        throw DimensionError("clustered_matrix: plan does not match channel row count");

    CMat h_c(h.rows(), h.cols());
    for (Eigen::Index u = 0; u < h.rows(); ++u)
        h_c.row(plan.permutation[static_cast<std::size_t>(u)]) = h.row(u);
    return h_c;
}

CMat interference_submatrix(const CMat &h_c, Eigen::Index k)
{
    const Eigen::Index n_c = h_c.rows() / 2;
    if (k < 0 || k >= n_c)
        throw std::out_of_range("interference_submatrix: cluster index out of range");

    CMat sub(h_c.rows() - 2, h_c.cols());
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < h_c.rows(); ++i)
    {
        if (i == 2 * k || i == 2 * k + 1)
            continue;
        sub.row(r++) = h_c.row(i);
    }
    return sub;
}

Beamformer beamformer(const CMat &h_minus_k, Eigen::Index n_t)
{
    if (h_minus_k.rows() > 0 && h_minus_k.cols() != n_t)
        throw DimensionError("beamformer: H_minus_k column count does not match n_t");
    if (h_minus_k.rows() > n_t)
        throw std::invalid_argument("beamformer: more interfering rows than antennas");

    Beamformer b;
    b.matrix = CMat::Identity(n_t, n_t);
    if (h_minus_k.rows() == 0)
        return b;

    const CMat solved = gram_inverse_apply(h_minus_k, GramSide::Left);
    b.matrix -= h_minus_k.adjoint() * solved;
    return b;
}

} // namespace nmce

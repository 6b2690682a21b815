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

#ifndef NMCE_NOMA_HPP
#define NMCE_NOMA_HPP

#include "nmce/common.hpp"

#include <utility>
#include <vector>

namespace nmce
{

/// Pairing of users into two-user clusters, strongest with weakest.
struct ClusterPlan
{
    /// cluster k = (strong user index, weak user index), original indices
    std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;
    /// original user index -> row of the clustered matrix
    std::vector<Eigen::Index> permutation;

    Eigen::Index num_clusters() const { return static_cast<Eigen::Index>(clusters.size()); }
};

/// Orthogonal projection onto the complement of the other clusters' rows.
/// Hermitian and idempotent to 1e-10.
struct Beamformer
{
    CMat matrix; // N_t x N_t
};

/// Sorts users by channel row norm (descending, ties broken by lower original
/// index) and pairs the k-th strongest with the k-th weakest. Requires an
/// even user count.
ClusterPlan cluster_users(const CMat &h);

/// Reorders rows of h so rows 2k, 2k+1 are cluster k's strong and weak user.
CMat clustered_matrix(const CMat &h, const ClusterPlan &plan);

/// All rows of the clustered matrix except cluster k's two, order preserved.
/// k is a zero-based cluster index.
CMat interference_submatrix(const CMat &h_c, Eigen::Index k);

/// B = I - A^H (A A^H)^{-1} A for A = h_minus_k. An empty A gives identity.
/// Rank-deficient A raises SingularMatrixError via the Gram guard.
Beamformer beamformer(const CMat &h_minus_k, Eigen::Index n_t);

} // namespace nmce

#endif

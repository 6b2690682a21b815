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

#ifndef NMCE_MEASUREMENT_HPP
#define NMCE_MEASUREMENT_HPP

#include "nmce/common.hpp"
#include "nmce/noma.hpp"
#include "nmce/rng.hpp"

#include <vector>

namespace nmce
{

/// Each cluster has two single-antenna users, so the per-cluster receive
/// dimension is 2 everywhere in the pilot chain.
constexpr Eigen::Index kClusterUsers = 2;

struct PilotConfig
{
    double total_power = 1.0;   // P
    double power_scaling = 0.5; // alpha; the pilot amplitude is P regardless
    Eigen::Index m_r = 2;       // combining vectors
    Eigen::Index m_t = 32;      // precoding vectors
    double noise_variance = 1.0; // pre-combining, per entry
};

/// sqrt(P) * I. The alpha*P + (1-alpha)*P split collapses to P identically.
CMat pilot_matrix(const PilotConfig &config, Eigen::Index dim);

/// First m_r columns of the 2x2 unitary DFT (per-cluster receive side).
CMat combiner(Eigen::Index m_r);

/// First m_t columns of the n_t x n_t unitary DFT.
CMat precoder(Eigen::Index n_t, Eigen::Index m_t);

struct ClusterObservation
{
    CMat y; // m_r x m_t received pilot block
    Eigen::Index cluster_index = 0;
};

/// Y_k = W^H H_k B_k F S + W^H N with N i.i.d. CN(0, noise_variance).
/// Throws DimensionError naming the factor that breaks the shape chain.
ClusterObservation observe_cluster(const CMat &h_k, const Beamformer &b_k, const CMat &w, const CMat &f,
                                   const CMat &s, Rng &rng, double noise_variance, Eigen::Index cluster_index = 0);

/// Pseudo-inverse reconstruction of the pilot block, normalized by 1/sqrt(P)
/// so the result estimates H_k B_k at every transmit power. The left factor
/// branches on m_r against the per-cluster receive dimension, the right
/// factor on m_t against n_t.
CMat tentative_estimate(const ClusterObservation &y_k, const CMat &w, const CMat &f, double total_power);

struct CoarseObservation
{
    CMat y_tilde; // N_r x N_t, rows 2k..2k+1 belong to cluster k
};

/// Vertical stack of per-cluster tentative estimates, cluster order.
CoarseObservation assemble_coarse(const std::vector<CMat> &parts);

} // namespace nmce

#endif

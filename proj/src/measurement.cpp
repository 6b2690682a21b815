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

#include "nmce/measurement.hpp"
#include "nmce/numerics.hpp"

#include <cmath>

namespace nmce
{

CMat pilot_matrix(const PilotConfig &config, Eigen::Index dim)
{
    if (config.total_power <= 0.0)
        throw std::invalid_argument("pilot_matrix: total power must be positive");
    if (config.power_scaling < 0.0 || config.power_scaling > 1.0)
        throw std::invalid_argument("pilot_matrix: power scaling must lie in [0, 1]");
    if (dim < 1)
        throw std::invalid_argument("pilot_matrix: dimension must be at least 1");

    const double amplitude =
        std::sqrt(config.power_scaling * config.total_power + (1.0 - config.power_scaling) * config.total_power);
    return amplitude * CMat::Identity(dim, dim);
}

CMat combiner(Eigen::Index m_r)
{
    if (m_r < 1 || m_r > kClusterUsers)
        throw std::invalid_argument("combiner: m_r must be 1 or 2 for two-user clusters");
    return dft_matrix(kClusterUsers).leftCols(m_r);
}

CMat precoder(Eigen::Index n_t, Eigen::Index m_t)
{
    if (n_t < 1 || m_t < 1 || m_t > n_t)
        throw std::invalid_argument("precoder: require 1 <= m_t <= n_t");
    return dft_matrix(n_t).leftCols(m_t);
}

ClusterObservation observe_cluster(const CMat &h_k, const Beamformer &b_k, const CMat &w, const CMat &f,
                                   const CMat &s, Rng &rng, double noise_variance, Eigen::Index cluster_index)
{
    if (noise_variance < 0.0)
        throw std::invalid_argument("observe_cluster: noise variance must be nonnegative");
    if (w.rows() != h_k.rows())
        throw DimensionError("observe_cluster: combiner W rows must match the cluster's receive dimension");
    if (h_k.cols() != b_k.matrix.rows())
        throw DimensionError("observe_cluster: beamformer B_k does not match H_k column count");
    if (b_k.matrix.cols() != f.rows())
        throw DimensionError("observe_cluster: precoder F does not match the beamformer output dimension");
    if (f.cols() != s.rows() || s.rows() != s.cols())
        throw DimensionError("observe_cluster: pilot matrix S must be square with F's column count");

    ClusterObservation obs;
    obs.cluster_index = cluster_index;
    obs.y = w.adjoint() * h_k * b_k.matrix * f * s;
    if (noise_variance > 0.0)
        obs.y += w.adjoint() * sample_complex_gaussian(rng, h_k.rows(), s.cols(), noise_variance);
    return obs;
}

CMat tentative_estimate(const ClusterObservation &y_k, const CMat &w, const CMat &f, double total_power)
{
    if (total_power <= 0.0)
        throw std::invalid_argument("tentative_estimate: total power must be positive");

    const Eigen::Index m_r = w.cols();
    const Eigen::Index m_t = f.cols();
    const Eigen::Index n_t = f.rows();
    if (y_k.y.rows() != m_r)
        throw DimensionError("tentative_estimate: observation rows do not match combiner W");
    if (y_k.y.cols() != m_t)
        throw DimensionError("tentative_estimate: observation columns do not match precoder F");

    // Left factor: W below the receive dimension, (W W^H)^{-1} W at or above.
    const CMat g_left = m_r < w.rows() ? w : gram_inverse_apply(w, GramSide::Left);
    // Right factor: F^H below n_t, F^H (F F^H)^{-1} at n_t.
    const CMat g_right = m_t < n_t ? CMat(f.adjoint()) : gram_inverse_apply(f, GramSide::Right);

    return (g_left * y_k.y * g_right) / std::sqrt(total_power);
}

CoarseObservation assemble_coarse(const std::vector<CMat> &parts)
{
    if (parts.empty())
        throw std::invalid_argument("assemble_coarse: at least one cluster part required");

    const Eigen::Index cols = parts.front().cols();
    Eigen::Index rows = 0;
    for (const CMat &p : parts)
    {
        if (p.cols() != cols)
            throw DimensionError("assemble_coarse: cluster parts disagree on column count");
        rows += p.rows();
    }

    CoarseObservation out;
    out.y_tilde.resize(rows, cols);
    Eigen::Index r = 0;
    for (const CMat &p : parts)
    {
        out.y_tilde.middleRows(r, p.rows()) = p;
        r += p.rows();
    }
    return out;
}

} // namespace nmce

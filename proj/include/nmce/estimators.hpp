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

#ifndef NMCE_ESTIMATORS_HPP
#define NMCE_ESTIMATORS_HPP

#include "nmce/common.hpp"
#include "nmce/measurement.hpp"
#include "nmce/noma.hpp"

#include <utility>
#include <vector>

namespace nmce
{

/// The LS baseline is the normalized pseudo-inverse reconstruction itself.
inline CMat ls_estimate(const CMat &y_tilde_k)
{
    return y_tilde_k;
}

/// Pooled second-order statistics of (coarse, true) cluster pairs, vectorized
/// row-major. cov_yy is the coarse covariance, cross_hy the cross-covariance
/// of true channels with coarse estimates.
struct SecondOrderStats
{
    CVec mean_y;
    CVec mean_h;
    CMat cov_yy;
    CMat cross_hy;
    std::size_t sample_count = 0;
    std::vector<std::string> warnings;
};

/// Empirical means, covariance and cross-covariance over all supplied
/// (coarse, true) pairs. Fewer than 10x the vector dimension appends a
/// warning; a single pair yields zero covariance with a warning; an empty
/// list throws.
SecondOrderStats fit_second_order(const std::vector<std::pair<CMat, CMat>> &train_pairs);

/// Linear MMSE: vec(H) = mean_h + cross_hy (cov_yy + eps I)^{-1} (vec(Y) - mean_y)
/// with eps = 1e-6 trace(cov_yy)/dim.
CMat mmse_estimate(const CMat &y_tilde_k, const SecondOrderStats &stats);

/// Precomputed MMSE gain for repeated application of the same statistics.
struct MmseFilter
{
    CVec mean_y;
    CVec mean_h;
    CMat gain; // cross_hy (cov_yy + eps I)^{-1}
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;

    static MmseFilter from_stats(const SecondOrderStats &stats, Eigen::Index rows, Eigen::Index cols);
    CMat apply(const CMat &y_tilde_k) const;
};

/// Linear map from vec(H_k) to the noiseless vec of the coarse estimate,
/// plus the effective per-entry noise power of the mapped observation.
struct LinearObservationModel
{
    CMat forward_map;
    double noise_power = 0.0;
};

/// Assembles the model of the full pilot+reconstruction chain for one
/// cluster:  coarse = L H_k R + mapped noise, vectorized row-major as
/// kron(L, R^T). The noise descriptor is exact for unitary W, F.
LinearObservationModel make_cluster_model(const Beamformer &b_k, const CMat &w, const CMat &f,
                                          const PilotConfig &pilot);

/// Constrained Cramer-Rao bound on the identifiable subspace, normalized by
/// the average channel power: noise_power * sum_i 1/sigma_i^2 over the
/// nonzero singular values of the forward map, divided by channel_power.
double crb_nmse(const LinearObservationModel &model, double channel_power);

/// Factored view of the per-cluster chain used for bulk CRB evaluation and
/// for projecting estimation errors onto the identifiable subspace without
/// forming the Kronecker product.
struct ChainAnalysis
{
    double noise_power = 0.0;
    Eigen::VectorXd sigma_left;  // singular values of the 2x2 left factor
    Eigen::VectorXd sigma_right; // singular values of the right factor transpose
    CMat v_left;                 // right-singular vectors of the left factor
    CMat v_right;                // right-singular vectors of the right factor transpose
    double tol = 0.0;            // threshold on singular-value products

    double crb_sum() const;
    /// Squared norm of the component of a 2 x N_t error inside the
    /// identifiable subspace of the chain.
    double projected_error_sq(const CMat &error) const;
};

ChainAnalysis analyze_cluster_chain(const Beamformer &b_k, const CMat &w, const CMat &f, const PilotConfig &pilot);

} // namespace nmce

#endif

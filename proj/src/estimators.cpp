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

#include "nmce/estimators.hpp"
#include "nmce/numerics.hpp"

#include <cmath>
#include <iostream>

namespace nmce
{

namespace
{

Eigen::Map<const CVec> vec_view(const CMat &m)
{
    // row-major storage, so the flat view stacks rows
    return Eigen::Map<const CVec>(m.data(), m.size());
}

constexpr double kRankRelTol = 1e-10;

} // namespace

SecondOrderStats fit_second_order(const std::vector<std::pair<CMat, CMat>> &train_pairs)
{
    if (train_pairs.empty())
        throw std::invalid_argument("fit_second_order: empty training set");

    const Eigen::Index dim = train_pairs.front().first.size();
    if (train_pairs.front().second.size() != dim)
        throw DimensionError("fit_second_order: coarse and true pair shapes differ");

    SecondOrderStats stats;
    stats.sample_count = train_pairs.size();
    const double n = static_cast<double>(train_pairs.size());

    stats.mean_y = CVec::Zero(dim);
    stats.mean_h = CVec::Zero(dim);
    for (const auto &[coarse, truth] : train_pairs)
    {
        if (coarse.size() != dim || truth.size() != dim)
            throw DimensionError("fit_second_order: inconsistent pair shapes in training set");
        stats.mean_y += vec_view(coarse);
        stats.mean_h += vec_view(truth);
    }
    stats.mean_y /= n;
    stats.mean_h /= n;

    stats.cov_yy = CMat::Zero(dim, dim);
    stats.cross_hy = CMat::Zero(dim, dim);
    for (const auto &[coarse, truth] : train_pairs)
    {
        const CVec yc = vec_view(coarse) - stats.mean_y;
        const CVec hc = vec_view(truth) - stats.mean_h;
        stats.cov_yy.noalias() += yc * yc.adjoint();
        stats.cross_hy.noalias() += hc * yc.adjoint();
    }
    stats.cov_yy /= n;
    stats.cross_hy /= n;

    if (train_pairs.size() == 1)
        stats.warnings.push_back("single training pair, covariance is identically zero");
    else if (n < 10.0 * static_cast<double>(dim))
        stats.warnings.push_back("fewer than 10x dim training pairs, statistics may be noisy");
    for (const std::string &w : stats.warnings)
        std::cerr << "fit_second_order: warning: " << w << "\n";
    return stats;
}

MmseFilter MmseFilter::from_stats(const SecondOrderStats &stats, Eigen::Index rows, Eigen::Index cols)
{
    const Eigen::Index dim = stats.cov_yy.rows();
    if (rows * cols != dim)
        throw DimensionError("MmseFilter: rows*cols does not match the statistics dimension");

    const double eps = 1e-6 * stats.cov_yy.trace().real() / static_cast<double>(dim);
    CMat loaded = stats.cov_yy;
    loaded.diagonal().array() += eps;

    MmseFilter filter;
    filter.mean_y = stats.mean_y;
    filter.mean_h = stats.mean_h;
    // gain = cross_hy loaded^{-1}; solve on the adjoint to use the Hermitian
    // factorization of the loaded covariance
    filter.gain = loaded.ldlt().solve(stats.cross_hy.adjoint()).adjoint();
    filter.rows = rows;
    filter.cols = cols;
    return filter;
}

CMat MmseFilter::apply(const CMat &y_tilde_k) const
{
    if (y_tilde_k.size() != mean_y.size())
        throw DimensionError("MmseFilter: observation does not match fitted dimension");
    const CVec est = mean_h + gain * (vec_view(y_tilde_k) - mean_y);
    return Eigen::Map<const CMat>(est.data(), rows, cols);
}

CMat mmse_estimate(const CMat &y_tilde_k, const SecondOrderStats &stats)
{
    return MmseFilter::from_stats(stats, y_tilde_k.rows(), y_tilde_k.cols()).apply(y_tilde_k);
}

namespace
{

struct ChainFactors
{
    CMat left;  // G_L W^H, receive-side factor
    CMat right; // B_k F S G_R / sqrt(P), transmit-side factor
    double noise_power;
};

ChainFactors chain_factors(const Beamformer &b_k, const CMat &w, const CMat &f, const PilotConfig &pilot)
{
    const Eigen::Index n_t = f.rows();
    const CMat s = pilot_matrix(pilot, f.cols());
    const CMat g_left = w.cols() < w.rows() ? w : gram_inverse_apply(w, GramSide::Left);
    const CMat g_right = f.cols() < n_t ? CMat(f.adjoint()) : gram_inverse_apply(f, GramSide::Right);

    ChainFactors out;
    out.left = g_left * w.adjoint();
    out.right = b_k.matrix * f * s * g_right / std::sqrt(pilot.total_power);

    // Mapped noise is (1/sqrt(P)) G_L W^H N G_R. Its average per-entry power
    // factors over the two sides; for unitary W, F this is exactly
    // noise_variance / P per entry.
    const double row_gain = out.left.squaredNorm() / static_cast<double>(out.left.rows());
    const double col_gain = g_right.squaredNorm() / static_cast<double>(g_right.cols());
    out.noise_power = pilot.noise_variance * row_gain * col_gain / pilot.total_power;
    return out;
}

} // namespace

LinearObservationModel make_cluster_model(const Beamformer &b_k, const CMat &w, const CMat &f,
                                          const PilotConfig &pilot)
{
    const ChainFactors fac = chain_factors(b_k, w, f, pilot);
    const Eigen::Index m = fac.left.rows();  // = receive dim
    const Eigen::Index p = fac.left.cols();
    const Eigen::Index n = fac.right.cols();
    const Eigen::Index q = fac.right.rows();

    // vec_row(L H R) = kron(L, R^T) vec_row(H)
    LinearObservationModel model;
    model.forward_map = CMat::Zero(m * n, p * q);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            model.forward_map.block(i * n, j * q, n, q) = fac.left(i, j) * fac.right.transpose();
    model.noise_power = fac.noise_power;
    return model;
}

double crb_nmse(const LinearObservationModel &model, double channel_power)
{
    if (model.forward_map.size() == 0)
        throw std::invalid_argument("crb_nmse: empty observation model");
    if (channel_power <= 0.0)
        throw std::invalid_argument("crb_nmse: channel power must be positive");

    Eigen::JacobiSVD<CMat> svd(model.forward_map);
    const Eigen::VectorXd sv = svd.singularValues();
    const double tol = sv(0) * kRankRelTol;
    if (!(sv(0) > 0.0))
        throw std::invalid_argument("crb_nmse: observation model has rank zero");

    double crb_sum = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol)
            crb_sum += model.noise_power / (sv(i) * sv(i));
    return crb_sum / channel_power;
}

ChainAnalysis analyze_cluster_chain(const Beamformer &b_k, const CMat &w, const CMat &f, const PilotConfig &pilot)
{
    const ChainFactors fac = chain_factors(b_k, w, f, pilot);

    Eigen::JacobiSVD<CMat> svd_l(fac.left, Eigen::ComputeThinV);
    Eigen::JacobiSVD<CMat> svd_r(CMat(fac.right.transpose()), Eigen::ComputeThinV);

    ChainAnalysis a;
    a.noise_power = fac.noise_power;
    a.sigma_left = svd_l.singularValues();
    a.sigma_right = svd_r.singularValues();
    a.v_left = svd_l.matrixV();
    a.v_right = svd_r.matrixV();
    a.tol = a.sigma_left(0) * a.sigma_right(0) * kRankRelTol;
    return a;
}

double ChainAnalysis::crb_sum() const
{
    double sum = 0.0;
    for (Eigen::Index i = 0; i < sigma_left.size(); ++i)
        for (Eigen::Index j = 0; j < sigma_right.size(); ++j)
        {
            const double s = sigma_left(i) * sigma_right(j);
            if (s > tol)
                sum += noise_power / (s * s);
        }
    return sum;
}

double ChainAnalysis::projected_error_sq(const CMat &error) const
{
    if (error.rows() != v_left.rows() || error.cols() != v_right.rows())
        throw DimensionError("ChainAnalysis: error shape does not match the chain factors");

    // Coefficients of vec_row(error) in the kron(V_left, V_right) basis.
    const CMat coeff = v_left.adjoint() * error * v_right.conjugate();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < sigma_left.size(); ++i)
        for (Eigen::Index j = 0; j < sigma_right.size(); ++j)
            if (sigma_left(i) * sigma_right(j) > tol)
                sum += std::norm(coeff(i, j));
    return sum;
}

} // namespace nmce

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

#include "nmce/channel.hpp"

#include <cmath>

namespace nmce
{

CVec steering_vector(const ArrayGeometry &geometry, double angle_rad)
{
    if (geometry.num_elements < 1 || geometry.spacing_over_wavelength <= 0.0)
        throw std::invalid_argument("steering_vector: invalid array geometry");

    const Eigen::Index n = geometry.num_elements;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double phase_step = -2.0 * M_PI * geometry.spacing_over_wavelength * std::sin(angle_rad);
    CVec v(n);
    for (Eigen::Index m = 0; m < n; ++m)
    {
        const double phase = phase_step * static_cast<double>(m);
        v(m) = scale * cxd(std::cos(phase), std::sin(phase));
    }
    return v;
}

std::vector<PathParams> sample_paths(Rng &rng, const ChannelConfig &config)
{
    if (config.num_paths < 1)
        throw std::invalid_argument("sample_paths: num_paths must be at least 1");
    if (config.avg_path_power < 0.0)
        throw std::invalid_argument("sample_paths: avg_path_power must be nonnegative");

    constexpr double two_pi = 2.0 * M_PI;
    std::vector<PathParams> paths;
    paths.reserve(static_cast<std::size_t>(config.num_paths));
    for (Eigen::Index l = 0; l < config.num_paths; ++l)
    {
        PathParams p;
        p.gain = rng.complex_gaussian(config.avg_path_power);
        p.aoa_rad = rng.uniform(0.0, two_pi);
        p.aod_rad = rng.uniform(0.0, two_pi);
        p.delay_s = rng.uniform(0.0, config.delay_window_s);
        paths.push_back(p);
    }
    return paths;
}

CRow user_channel(const std::vector<PathParams> &paths, const ArrayGeometry &geometry_tx)
{
    if (paths.empty())
        throw std::invalid_argument("user_channel: at least one path required");

    CRow h = CRow::Zero(geometry_tx.num_elements);
    for (const PathParams &p : paths)
        h += p.gain * steering_vector(geometry_tx, p.aod_rad).adjoint();
    return h;
}

CMat multi_user_channel(Rng &rng, const ChannelConfig &config, Eigen::Index num_users)
{
    if (num_users < 2 || num_users % 2 != 0)
        throw std::invalid_argument("multi_user_channel: num_users must be even and at least 2");

    // One base draw so repeated calls on the same generator differ; each user
    // then owns stream index u and rows can be generated in any order.
    Rng base(rng.next_u64());
    CMat h(num_users, config.geometry_tx.num_elements);
    for (Eigen::Index u = 0; u < num_users; ++u)
    {
        Rng user_rng = base.substream(static_cast<std::uint64_t>(u));
        h.row(u) = user_channel(sample_paths(user_rng, config), config.geometry_tx);
    }
    return h;
}

} // namespace nmce

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

#ifndef NMCE_CHANNEL_HPP
#define NMCE_CHANNEL_HPP

#include "nmce/common.hpp"
#include "nmce/rng.hpp"

#include <vector>

namespace nmce
{

struct ArrayGeometry
{
    Eigen::Index num_elements = 1;
    double spacing_over_wavelength = 0.5; // d / lambda
};

struct PathParams
{
    cxd gain;        // complex propagation gain
    double delay_s;  // stored for provenance, does not enter the flat channel
    double aoa_rad;  // azimuth angle of arrival, [0, 2pi)
    double aod_rad;  // azimuth angle of departure, [0, 2pi)
};

struct ChannelConfig
{
    Eigen::Index num_paths = 3;
    double avg_path_power = 1.0 / 3.0; // E|gain|^2 per path
    ArrayGeometry geometry_tx{32, 0.5};
    ArrayGeometry geometry_rx{16, 0.5};
    double carrier_frequency_hz = 28e9; // metadata only
    double delay_window_s = 1e-7;       // delays sampled uniform on [0, window)
};

/// ULA response, element m = exp(-j 2 pi (d/lambda) m sin(angle)) / sqrt(N).
/// Unit Euclidean norm by construction.
CVec steering_vector(const ArrayGeometry &geometry, double angle_rad);

/// Draws config.num_paths independent paths: CN(0, avg_path_power) gains,
/// angles uniform on [0, 2pi), delays uniform on [0, delay_window_s).
std::vector<PathParams> sample_paths(Rng &rng, const ChannelConfig &config);

/// Flat channel row of a single-antenna user: h = sum_l gain_l * a_T(aod_l)^H.
CRow user_channel(const std::vector<PathParams> &paths, const ArrayGeometry &geometry_tx);

/// Stacks num_users independent user rows into a num_users x N_t matrix.
/// Row u is generated from its own substream, so the result does not depend
/// on evaluation order. num_users must be even (clustering pairs users).
CMat multi_user_channel(Rng &rng, const ChannelConfig &config, Eigen::Index num_users);

} // namespace nmce

#endif

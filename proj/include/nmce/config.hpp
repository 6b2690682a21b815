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

#ifndef NMCE_CONFIG_HPP
#define NMCE_CONFIG_HPP

#include "nmce/cnn.hpp"
#include "nmce/common.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nmce
{

/// Full experiment description. Defaults are the reference scenario:
/// 32 transmit antennas, 16 single-antenna users in 8 clusters, 3 paths,
/// unit-power channels, DFT combiner/precoder with M_r=2 and M_t=32.
struct ExperimentConfig
{
    struct Scenario
    {
        int n_t = 32;
        int n_r = 16; // users (one antenna each)
        int n_c = 8;  // clusters, n_r / 2
        int rf_chains_tx = 2; // metadata
        int rf_chains_rx = 2; // metadata
        int num_paths = 3;
        double avg_path_power = 1.0 / 3.0;
        double spacing_over_wavelength = 0.5;
        double carrier_frequency_hz = 28e9;
    } scenario;

    struct Pilot
    {
        double total_power = 1.0; // used when no SNR point overrides it
        double power_scaling = 0.5;
        int m_r = 2;
        int m_t = 32;
        double noise_variance = 1.0;
    } pilot;

    std::vector<double> snr_grid_db{0.0, 5.0, 10.0, 15.0, 20.0};

    struct DatasetSizes
    {
        int train = 8100;
        int val = 900;
        int test = 1900;
        std::string snr_mode = "per_snr"; // per_snr | mixed (draws from the grid)
    } dataset;

    struct Training
    {
        int epochs = 100;
        double learning_rate = 3e-4;
        int batch_size = 128;
        int layer_count = 6;
        int filters = 64;
        std::uint64_t seed = 1;
        std::string init = "glorot"; // glorot | fan_in
    } training;

    struct Sweep
    {
        std::vector<double> learning_rates{3e-2, 3e-3, 3e-4, 3e-5};
        std::vector<int> layer_counts{3, 4, 5, 6, 7};
        int epochs = 20;
        double snr_db = 15.0;
    } sweep;
};

/// SNR is transmit power over noise power with unit noise variance.
inline double snr_db_to_power(double snr_db, double noise_variance)
{
    return noise_variance * std::pow(10.0, snr_db / 10.0);
}

/// Reduced profile sized for a desktop run: 2000/500/1000 samples,
/// 16 filters, 20 epochs, batch 16, lr 3e-3, fan-in init, SNR {0,10,20}.
void apply_desk_scale(ExperimentConfig &config);

/// Parses the sectioned key=value format. Unknown keys, bad numbers and
/// malformed lines raise ConfigError with file and line.
ExperimentConfig parse_config(const std::filesystem::path &path);
ExperimentConfig parse_config_text(const std::string &text, const std::string &origin = "<string>");

/// Canonical serialization: every key in fixed section order. Written back
/// by the run manifest; parsing it reproduces the config exactly.
std::string canonical_config_text(const ExperimentConfig &config);

/// FNV-1a hash of the canonical text.
std::uint64_t config_hash(const ExperimentConfig &config);

InitScheme init_scheme_from_string(const std::string &name);

} // namespace nmce

#endif

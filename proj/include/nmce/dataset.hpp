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

#ifndef NMCE_DATASET_HPP
#define NMCE_DATASET_HPP

#include "nmce/config.hpp"
#include "nmce/rng.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace nmce
{

/// One simulated snapshot: the assembled coarse observation, the true
/// clustered channel it estimates, and the SNR the pilots were observed at.
/// Values are stored in single precision, matching the on-disk format.
struct Sample
{
    CMatF coarse;
    CMatF truth;
    float snr_db = 0.0f;
};

struct Dataset
{
    std::vector<Sample> samples;
    int n_r = 0, n_t = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

enum class Split
{
    Train = 1,
    Val = 2,
    Test = 3
};

/// Per-sample SNR selection: a fixed point, or uniform draws from the grid.
struct SnrSpec
{
    std::optional<double> fixed_db;
    std::vector<double> grid_db;

    static SnrSpec fixed(double db) { return SnrSpec{db, {}}; }
    static SnrSpec mixed(std::vector<double> grid) { return SnrSpec{std::nullopt, std::move(grid)}; }
};

/// Simulates `size of split` samples: channel draw, clustering, per-cluster
/// beamforming, pilot observation, tentative estimation, assembly. Each
/// sample derives its own stream from (seed, split, index), so generation
/// parallelizes without changing results. A singular draw is resampled up to
/// 10 times before failing.
Dataset generate_dataset(const ExperimentConfig &config, Split split, const SnrSpec &snr, std::uint64_t seed);

// File format "NDST": magic, u16 version, u32 rows, u32 cols, u32 count,
// u64 config hash, u64 seed, then per sample an f32 SNR in dB followed by
// coarse and true matrices as row-major interleaved real/imag f32.
void save_dataset(const std::filesystem::path &path, const Dataset &dataset);
Dataset load_dataset(const std::filesystem::path &path);

/// Splits a dataset's samples into per-cluster (coarse, true) pairs of shape
/// 2 x N_t, in cluster order; used to fit baseline statistics.
std::vector<std::pair<CMat, CMat>> cluster_pairs(const Dataset &dataset);

} // namespace nmce

#endif

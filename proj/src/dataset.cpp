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

#include "nmce/dataset.hpp"

#include "nmce/channel.hpp"
#include "nmce/estimators.hpp"
#include "nmce/measurement.hpp"
#include "nmce/noma.hpp"
#include "nmce/numerics.hpp"

#include <cstring>
#include <fstream>

namespace nmce
{

namespace
{

ChannelConfig channel_config_from(const ExperimentConfig &config)
{
    ChannelConfig ch;
    ch.num_paths = config.scenario.num_paths;
    ch.avg_path_power = config.scenario.avg_path_power;
    ch.geometry_tx = {config.scenario.n_t, config.scenario.spacing_over_wavelength};
    ch.geometry_rx = {config.scenario.n_r, config.scenario.spacing_over_wavelength};
    ch.carrier_frequency_hz = config.scenario.carrier_frequency_hz;
    return ch;
}

int split_size(const ExperimentConfig &config, Split split)
{
    switch (split)
    {
    case Split::Train: return config.dataset.train;
    case Split::Val: return config.dataset.val;
    default: return config.dataset.test;
    }
}

CMatF to_single(const CMat &m)
{
    return m.cast<cxf>();
}

/// One full simulated sample. Throws SingularMatrixError on degenerate draws.
Sample simulate_sample(const ExperimentConfig &config, const ChannelConfig &ch, const CMat &w, const CMat &f,
                       double snr_db, Rng &rng)
{
    PilotConfig pilot;
    pilot.total_power = snr_db_to_power(snr_db, config.pilot.noise_variance);
    pilot.power_scaling = config.pilot.power_scaling;
    pilot.m_r = config.pilot.m_r;
    pilot.m_t = config.pilot.m_t;
    pilot.noise_variance = config.pilot.noise_variance;
    const CMat s = pilot_matrix(pilot, pilot.m_t);

    Rng channel_rng = rng.substream(1);
    const CMat h = multi_user_channel(channel_rng, ch, config.scenario.n_r);
    const ClusterPlan plan = cluster_users(h);
    const CMat h_c = clustered_matrix(h, plan);

    std::vector<CMat> parts;
    parts.reserve(static_cast<std::size_t>(plan.num_clusters()));
    for (Eigen::Index k = 0; k < plan.num_clusters(); ++k)
    {
        const Beamformer b_k = beamformer(interference_submatrix(h_c, k), config.scenario.n_t);
        Rng noise_rng = rng.substream(100 + static_cast<std::uint64_t>(k));
        const ClusterObservation y_k = observe_cluster(h_c.middleRows(2 * k, 2), b_k, w, f, s, noise_rng,
                                                       pilot.noise_variance, k);
        parts.push_back(tentative_estimate(y_k, w, f, pilot.total_power));
    }

    Sample sample;
    sample.coarse = to_single(assemble_coarse(parts).y_tilde);
    sample.truth = to_single(h_c);
    sample.snr_db = static_cast<float>(snr_db);
    return sample;
}

} // namespace

Dataset generate_dataset(const ExperimentConfig &config, Split split, const SnrSpec &snr, std::uint64_t seed)
{
    const int count = split_size(config, split);
    const ChannelConfig ch = channel_config_from(config);
    const CMat w = combiner(config.pilot.m_r);
    const CMat f = precoder(config.scenario.n_t, config.pilot.m_t);

    Dataset ds;
    ds.n_r = config.scenario.n_r;
    ds.n_t = config.scenario.n_t;
    ds.config_hash = config_hash(config);
    ds.seed = seed;
    ds.samples.resize(static_cast<std::size_t>(count));

    const Rng split_rng = Rng(seed).substream(static_cast<std::uint64_t>(split));
    bool failed = false;
    std::string failure;

#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < count; ++i)
    {
        if (failed)
            continue;
        Rng sample_rng = split_rng.substream(static_cast<std::uint64_t>(i));
        double snr_db;
        if (snr.fixed_db)
            snr_db = *snr.fixed_db;
        else
        {
            const std::size_t pick =
                static_cast<std::size_t>(sample_rng.uniform() * static_cast<double>(snr.grid_db.size()));
            snr_db = snr.grid_db[std::min(pick, snr.grid_db.size() - 1)];
        }

        // resample degenerate channel draws, at most 10 times
        for (int attempt = 0;; ++attempt)
        {
            try
            {
                Rng attempt_rng = sample_rng.substream(1000 + static_cast<std::uint64_t>(attempt));
                ds.samples[static_cast<std::size_t>(i)] = simulate_sample(config, ch, w, f, snr_db, attempt_rng);
                break;
            }
            catch (const SingularMatrixError &e)
            {
                if (attempt >= 9)
                {
#pragma omp critical
                    {
                        failed = true;
                        failure = e.what();
                    }
                    break;
                }
            }
        }
    }

    if (failed)
        throw SingularMatrixError("generate_dataset: persistent singular draws: " + failure, config.scenario.n_t);
    return ds;
}

namespace
{

template <typename T>
void write_pod(std::ofstream &out, const T &v)
{
    out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream &in, const std::string &what, const std::filesystem::path &path)
{
    T v{};
    in.read(reinterpret_cast<char *>(&v), sizeof(T));
    if (!in)
        throw std::runtime_error("load_dataset: truncated " + what + " in " + path.string());
    return v;
}

void write_matrix(std::ofstream &out, const CMatF &m)
{
    // row-major complex<float> is interleaved re/im f32 on disk already
    out.write(reinterpret_cast<const char *>(m.data()), static_cast<std::streamsize>(m.size()) * 8);
}

CMatF read_matrix(std::ifstream &in, int rows, int cols, const std::filesystem::path &path)
{
    CMatF m(rows, cols);
    in.read(reinterpret_cast<char *>(m.data()), static_cast<std::streamsize>(m.size()) * 8);
    if (!in)
        throw std::runtime_error("load_dataset: truncated sample matrix in " + path.string());
    return m;
}

} // namespace

void save_dataset(const std::filesystem::path &path, const Dataset &dataset)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("save_dataset: cannot open " + path.string());

    out.write("NDST", 4);
    write_pod<std::uint16_t>(out, 1);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(dataset.n_r));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(dataset.n_t));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(dataset.samples.size()));
    write_pod<std::uint64_t>(out, dataset.config_hash);
    write_pod<std::uint64_t>(out, dataset.seed);
    for (const Sample &s : dataset.samples)
    {
        write_pod<float>(out, s.snr_db);
        write_matrix(out, s.coarse);
        write_matrix(out, s.truth);
    }
    if (!out)
        throw std::runtime_error("save_dataset: write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_dataset: missing dataset file " + path.string());

    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "NDST", 4) != 0)
        throw std::runtime_error("load_dataset: bad magic in " + path.string());
    const auto version = read_pod<std::uint16_t>(in, "version", path);
    if (version != 1)
        throw std::runtime_error("load_dataset: unsupported version in " + path.string());

    Dataset ds;
    ds.n_r = static_cast<int>(read_pod<std::uint32_t>(in, "row count", path));
    ds.n_t = static_cast<int>(read_pod<std::uint32_t>(in, "column count", path));
    const auto count = read_pod<std::uint32_t>(in, "sample count", path);
    ds.config_hash = read_pod<std::uint64_t>(in, "config hash", path);
    ds.seed = read_pod<std::uint64_t>(in, "seed", path);

    ds.samples.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i)
    {
        Sample s;
        s.snr_db = read_pod<float>(in, "sample snr", path);
        s.coarse = read_matrix(in, ds.n_r, ds.n_t, path);
        s.truth = read_matrix(in, ds.n_r, ds.n_t, path);
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

std::vector<std::pair<CMat, CMat>> cluster_pairs(const Dataset &dataset)
{
    std::vector<std::pair<CMat, CMat>> pairs;
    pairs.reserve(dataset.samples.size() * static_cast<std::size_t>(dataset.n_r / 2));
    for (const Sample &s : dataset.samples)
    {
        const CMat coarse = s.coarse.cast<cxd>();
        const CMat truth = s.truth.cast<cxd>();
        for (int k = 0; k < dataset.n_r / 2; ++k)
            pairs.emplace_back(coarse.middleRows(2 * k, 2), truth.middleRows(2 * k, 2));
    }
    return pairs;
}

} // namespace nmce

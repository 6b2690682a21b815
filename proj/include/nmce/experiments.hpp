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

#ifndef NMCE_EXPERIMENTS_HPP
#define NMCE_EXPERIMENTS_HPP

#include "nmce/cnn.hpp"
#include "nmce/config.hpp"
#include "nmce/dataset.hpp"
#include "nmce/estimators.hpp"
#include "nmce/metrics.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nmce
{

extern const char *kVersion;

/// Writes out_dir/manifest.txt: command, version, seed, config hash and the
/// full canonical config, enough to reproduce the run exactly.
void write_manifest(const std::filesystem::path &out_dir, const std::string &command,
                    const ExperimentConfig &config);

/// Seed recorded in a manifest file.
std::uint64_t manifest_seed(const std::filesystem::path &manifest_path);

/// Aggregated estimator quality over one set of samples.
struct EvalTotals
{
    double nmse_ls = 0.0;
    double nmse_mmse = 0.0;
    double nmse_cnn = 0.0;
    double crb_nmse = 0.0;
    double nmse_ls_projected = 0.0; // LS error inside the identifiable subspace
    double diff_mean = 0.0;         // mean of (projected LS - CRB), normalized
    double diff_stderr = 0.0;       // standard error of that difference
    std::size_t sample_count = 0;
};

/// Evaluates LS, optionally MMSE and CNN, and the constrained CRB on the
/// given samples. Beamformers are recomputed from the stored true channels.
EvalTotals evaluate_samples(const ExperimentConfig &config, const std::vector<const Sample *> &samples,
                            const MmseFilter *mmse, CnnModel *cnn);

struct Fig3Point
{
    double snr_db = 0.0;
    EvalTotals totals;
};

struct Fig3Result
{
    MetricsTable table;
    std::vector<Fig3Point> points;
};

/// Per-SNR pipeline: generate train/val/test at each grid point, train one
/// model per point, evaluate all estimators plus the CRB curve. Writes
/// nmse_vs_snr.csv, nmse_vs_snr.svg and manifest.txt under out_dir.
Fig3Result run_fig3(const ExperimentConfig &config, const std::filesystem::path &out_dir, int jobs = 1);

struct SweepCurve
{
    std::string label;
    std::vector<double> val_rmse; // one entry per completed epoch
    bool diverged = false;
};

struct SweepResult
{
    MetricsTable table;
    std::vector<SweepCurve> curves;
};

/// Learning-rate sweep at the sweep SNR; identical data and seed per curve.
/// Writes rmse_vs_epoch_lr.csv/.svg and manifest.txt.
SweepResult run_fig4(const ExperimentConfig &config, const std::filesystem::path &out_dir, int jobs = 1);

/// Depth sweep at the sweep SNR. Writes rmse_vs_epoch_layers.csv/.svg.
SweepResult run_fig5(const ExperimentConfig &config, const std::filesystem::path &out_dir, int jobs = 1);

/// `generate` subcommand: per-SNR train/val/test datasets under out_dir.
void generate_datasets(const ExperimentConfig &config, const std::filesystem::path &out_dir);

/// `train` subcommand: trains on out_dir/train_snr*.ndst for the given SNR
/// (defaults to the sweep SNR), writes model .nchk and history CSV.
void train_from_files(const ExperimentConfig &config, const std::filesystem::path &out_dir, double snr_db);

/// `evaluate` subcommand: evaluates a checkpoint against a test dataset,
/// grouping by the SNRs present; writes eval.csv.
MetricsTable evaluate_from_files(const ExperimentConfig &config, const std::filesystem::path &out_dir,
                                 double snr_db);

} // namespace nmce

#endif

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

#include "nmce/experiments.hpp"

#include "nmce/measurement.hpp"
#include "nmce/noma.hpp"
#include "nmce/svg.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <omp.h>

namespace nmce
{

const char *kVersion = "1.0.0";

void write_manifest(const std::filesystem::path &out_dir, const std::string &command,
                    const ExperimentConfig &config)
{
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir / "manifest.txt", std::ios::binary);
    if (!out)
        throw std::runtime_error("write_manifest: cannot open " + (out_dir / "manifest.txt").string());
    out << "command = " << command << "\n"
        << "version = " << kVersion << "\n"
        << "config_hash = " << config_hash(config) << "\n"
        << "seed = " << config.training.seed << "\n"
        << "\n# canonical configuration\n"
        << canonical_config_text(config);
}

std::uint64_t manifest_seed(const std::filesystem::path &manifest_path)
{
    std::ifstream in(manifest_path);
    if (!in)
        throw std::runtime_error("manifest_seed: cannot open " + manifest_path.string());
    std::string line;
    while (std::getline(in, line))
    {
        const std::string prefix = "seed = ";
        if (line.rfind(prefix, 0) == 0)
            return std::stoull(line.substr(prefix.size()));
    }
    throw std::runtime_error("manifest_seed: no seed entry in " + manifest_path.string());
}

namespace
{

TrainSettings train_settings_from(const ExperimentConfig &config, std::uint64_t seed)
{
    TrainSettings s;
    s.layer_count = config.training.layer_count;
    s.filters = config.training.filters;
    s.epochs = config.training.epochs;
    s.learning_rate = config.training.learning_rate;
    s.batch_size = config.training.batch_size;
    s.seed = seed;
    s.init = init_scheme_from_string(config.training.init);
    return s;
}

PilotConfig pilot_at(const ExperimentConfig &config, double snr_db)
{
    PilotConfig pilot;
    pilot.total_power = snr_db_to_power(snr_db, config.pilot.noise_variance);
    pilot.power_scaling = config.pilot.power_scaling;
    pilot.m_r = config.pilot.m_r;
    pilot.m_t = config.pilot.m_t;
    pilot.noise_variance = config.pilot.noise_variance;
    return pilot;
}

void split_io(const Dataset &ds, std::vector<CMatF> &coarse, std::vector<CMatF> &truth)
{
    coarse.reserve(ds.samples.size());
    truth.reserve(ds.samples.size());
    for (const Sample &s : ds.samples)
    {
        coarse.push_back(s.coarse);
        truth.push_back(s.truth);
    }
}

/// Runs jobs with a bounded worker pool; each worker restricts its own
/// OpenMP parallel regions so total thread counts stay near the hardware.
void run_jobs(std::size_t count, int jobs, const std::function<void(std::size_t)> &work)
{
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
    if (workers == 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            work(i);
        return;
    }
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int omp_per_job = std::max(1, hw / workers);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            omp_set_num_threads(omp_per_job);
            try
            {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                    work(i);
            }
            catch (...)
            {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    for (std::thread &th : pool)
        th.join();
    for (const std::exception_ptr &e : errors)
        if (e)
            std::rethrow_exception(e);
}

std::string lr_label(double lr)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "lr=%.0e", lr);
    return buf;
}

} // namespace

EvalTotals evaluate_samples(const ExperimentConfig &config, const std::vector<const Sample *> &samples,
                            const MmseFilter *mmse, CnnModel *cnn)
{
    if (samples.empty())
        throw std::invalid_argument("evaluate_samples: no samples");

    const int n_c = config.scenario.n_c;
    const CMat w = combiner(config.pilot.m_r);
    const CMat f = precoder(config.scenario.n_t, config.pilot.m_t);

    std::vector<CMatF> truth, ls_est, mmse_est, cnn_in;
    truth.reserve(samples.size());
    for (const Sample *s : samples)
    {
        truth.push_back(s->truth);
        ls_est.push_back(s->coarse); // the coarse estimate is the LS baseline
        cnn_in.push_back(s->coarse);
    }

    EvalTotals totals;
    totals.sample_count = samples.size();
    totals.nmse_ls = nmse(truth, ls_est);

    if (mmse)
    {
        mmse_est.reserve(samples.size());
        for (const Sample *s : samples)
        {
            const CMat coarse = s->coarse.cast<cxd>();
            CMat est(coarse.rows(), coarse.cols());
            for (int k = 0; k < n_c; ++k)
                est.middleRows(2 * k, 2) = mmse->apply(coarse.middleRows(2 * k, 2));
            mmse_est.push_back(est.cast<cxf>());
        }
        totals.nmse_mmse = nmse(truth, mmse_est);
    }

    if (cnn)
    {
        const std::vector<CMatF> cnn_est = predict(*cnn, cnn_in);
        totals.nmse_cnn = nmse(truth, cnn_est);
    }

    // CRB and subspace-restricted LS error; beamformers recomputed from the
    // stored true channels, chains evaluated at each sample's own SNR.
    double crb_total = 0.0, proj_total = 0.0, power_total = 0.0;
    std::vector<double> diffs;
    diffs.reserve(samples.size() * static_cast<std::size_t>(n_c));
    for (const Sample *s : samples)
    {
        const CMat h_c = s->truth.cast<cxd>();
        const CMat coarse = s->coarse.cast<cxd>();
        const PilotConfig pilot = pilot_at(config, static_cast<double>(s->snr_db));
        for (int k = 0; k < n_c; ++k)
        {
            const Beamformer b_k = beamformer(interference_submatrix(h_c, k), config.scenario.n_t);
            const ChainAnalysis chain = analyze_cluster_chain(b_k, w, f, pilot);
            const CMat err = coarse.middleRows(2 * k, 2) - h_c.middleRows(2 * k, 2);
            const double crb = chain.crb_sum();
            const double proj = chain.projected_error_sq(err);
            crb_total += crb;
            proj_total += proj;
            power_total += h_c.middleRows(2 * k, 2).squaredNorm();
            diffs.push_back(proj - crb);
        }
    }
    const double mean_power = power_total / static_cast<double>(diffs.size());
    totals.crb_nmse = crb_total / power_total;
    totals.nmse_ls_projected = proj_total / power_total;

    double dmean = 0.0;
    for (double d : diffs)
        dmean += d;
    dmean /= static_cast<double>(diffs.size());
    double dvar = 0.0;
    for (double d : diffs)
        dvar += (d - dmean) * (d - dmean);
    dvar /= static_cast<double>(diffs.size() > 1 ? diffs.size() - 1 : 1);
    totals.diff_mean = dmean / mean_power;
    totals.diff_stderr = std::sqrt(dvar / static_cast<double>(diffs.size())) / mean_power;
    return totals;
}

Fig3Result run_fig3(const ExperimentConfig &config, const std::filesystem::path &out_dir, int jobs)
{
    std::filesystem::create_directories(out_dir);
    const std::size_t n_points = config.snr_grid_db.size();
    Fig3Result result;
    result.points.resize(n_points);

    run_jobs(n_points, jobs, [&](std::size_t idx) {
        const double snr_db = config.snr_grid_db[idx];
        const std::uint64_t point_seed = Rng(config.training.seed).substream(10 + idx).seed();

        const Dataset train_ds = generate_dataset(config, Split::Train, SnrSpec::fixed(snr_db), point_seed);
        const Dataset val_ds = generate_dataset(config, Split::Val, SnrSpec::fixed(snr_db), point_seed);
        const Dataset test_ds = generate_dataset(config, Split::Test, SnrSpec::fixed(snr_db), point_seed);

        std::vector<CMatF> train_in, train_t, val_in, val_t;
        split_io(train_ds, train_in, train_t);
        split_io(val_ds, val_in, val_t);
        TrainResult trained = train_cnn(train_in, train_t, val_in, val_t,
                                        train_settings_from(config, Rng(point_seed).substream(7).seed()));

        const SecondOrderStats stats = fit_second_order(cluster_pairs(train_ds));
        const MmseFilter filter = MmseFilter::from_stats(stats, 2, config.scenario.n_t);

        std::vector<const Sample *> test_view;
        test_view.reserve(test_ds.samples.size());
        for (const Sample &s : test_ds.samples)
            test_view.push_back(&s);

        Fig3Point point;
        point.snr_db = snr_db;
        point.totals = evaluate_samples(config, test_view, &filter, &trained.model);
        result.points[idx] = point;

        save_checkpoint(out_dir / ("model_snr" + format_double(snr_db) + "db.nchk"), trained.model);
    });

    result.table.columns = {"method", "snr_db", "nmse"};
    const char *methods[] = {"LS", "MMSE", "CNN", "CRB"};
    for (const char *method : methods)
        for (const Fig3Point &p : result.points)
        {
            double value = 0.0;
            if (std::string(method) == "LS")
                value = p.totals.nmse_ls;
            else if (std::string(method) == "MMSE")
                value = p.totals.nmse_mmse;
            else if (std::string(method) == "CNN")
                value = p.totals.nmse_cnn;
            else
                value = p.totals.crb_nmse;
            result.table.add_row({method, format_double(p.snr_db), format_double(value)});
        }
    result.table.write_csv(out_dir / "nmse_vs_snr.csv");

    std::vector<SvgSeries> series(4);
    for (std::size_t m = 0; m < 4; ++m)
    {
        series[m].label = methods[m];
        for (const Fig3Point &p : result.points)
        {
            const double vals[] = {p.totals.nmse_ls, p.totals.nmse_mmse, p.totals.nmse_cnn, p.totals.crb_nmse};
            series[m].points.emplace_back(p.snr_db, vals[m]);
        }
    }
    write_line_chart(out_dir / "nmse_vs_snr.svg", "Channel estimation NMSE vs SNR", "SNR [dB]", "NMSE",
                     series, /*log_y=*/true);
    write_manifest(out_dir, "fig3", config);
    return result;
}

namespace
{

SweepResult run_sweep(const ExperimentConfig &config, const std::filesystem::path &out_dir, int jobs,
                      const std::vector<std::string> &labels,
                      const std::function<TrainSettings(std::size_t)> &settings_for, const std::string &command,
                      const std::string &stem)
{
    std::filesystem::create_directories(out_dir);
    const double snr_db = config.sweep.snr_db;
    const std::uint64_t data_seed = Rng(config.training.seed).substream(40).seed();
    const Dataset train_ds = generate_dataset(config, Split::Train, SnrSpec::fixed(snr_db), data_seed);
    const Dataset val_ds = generate_dataset(config, Split::Val, SnrSpec::fixed(snr_db), data_seed);
    std::vector<CMatF> train_in, train_t, val_in, val_t;
    split_io(train_ds, train_in, train_t);
    split_io(val_ds, val_in, val_t);

    SweepResult result;
    result.curves.resize(labels.size());

    run_jobs(labels.size(), jobs, [&](std::size_t idx) {
        TrainSettings settings = settings_for(idx);
        settings.throw_on_divergence = false; // divergence becomes a truncated curve
        const TrainResult trained = train_cnn(train_in, train_t, val_in, val_t, settings);
        SweepCurve curve;
        curve.label = labels[idx];
        curve.diverged = trained.diverged;
        for (const EpochStats &e : trained.history)
            curve.val_rmse.push_back(e.val_rmse);
        result.curves[idx] = std::move(curve);
    });

    result.table.columns = {"run", "epoch", "val_rmse"};
    for (const SweepCurve &curve : result.curves)
        for (std::size_t e = 0; e < curve.val_rmse.size(); ++e)
            result.table.add_row({curve.label, std::to_string(e + 1), format_double(curve.val_rmse[e])});
    result.table.write_csv(out_dir / (stem + ".csv"));

    std::vector<SvgSeries> series;
    for (const SweepCurve &curve : result.curves)
    {
        SvgSeries s;
        s.label = curve.label + (curve.diverged ? " (diverged)" : "");
        for (std::size_t e = 0; e < curve.val_rmse.size(); ++e)
            s.points.emplace_back(static_cast<double>(e + 1), curve.val_rmse[e]);
        if (!s.points.empty())
            series.push_back(std::move(s));
    }
    write_line_chart(out_dir / (stem + ".svg"), command + ": validation RMSE vs epochs", "epoch", "RMSE", series);
    write_manifest(out_dir, command, config);
    return result;
}

} // namespace

SweepResult run_fig4(const ExperimentConfig &config, const std::filesystem::path &out_dir, int jobs)
{
    std::vector<std::string> labels;
    for (double lr : config.sweep.learning_rates)
        labels.push_back(lr_label(lr));
    return run_sweep(
        config, out_dir, jobs, labels,
        [&](std::size_t idx) {
            TrainSettings s = train_settings_from(config, Rng(config.training.seed).substream(50).seed());
            s.epochs = config.sweep.epochs;
            s.learning_rate = config.sweep.learning_rates[idx];
            return s;
        },
        "fig4", "rmse_vs_epoch_lr");
}

SweepResult run_fig5(const ExperimentConfig &config, const std::filesystem::path &out_dir, int jobs)
{
    std::vector<std::string> labels;
    for (int lc : config.sweep.layer_counts)
        labels.push_back("layers=" + std::to_string(lc));
    return run_sweep(
        config, out_dir, jobs, labels,
        [&](std::size_t idx) {
            TrainSettings s = train_settings_from(config, Rng(config.training.seed).substream(50).seed());
            s.epochs = config.sweep.epochs;
            s.layer_count = config.sweep.layer_counts[idx];
            return s;
        },
        "fig5", "rmse_vs_epoch_layers");
}

namespace
{

std::string snr_tag(double snr_db)
{
    std::string tag = format_double(snr_db);
    for (char &ch : tag)
        if (ch == '.')
            ch = 'p';
    return tag;
}

} // namespace

namespace
{

/// File-name tag of the dataset a command should touch: the fixed SNR, or
/// "mixed" when the config pools the whole grid into one dataset.
std::string dataset_tag(const ExperimentConfig &config, double snr_db)
{
    return config.dataset.snr_mode == "mixed" ? "mixed" : snr_tag(snr_db);
}

} // namespace

void generate_datasets(const ExperimentConfig &config, const std::filesystem::path &out_dir)
{
    std::filesystem::create_directories(out_dir);
    if (config.dataset.snr_mode == "mixed")
    {
        const std::uint64_t seed = Rng(config.training.seed).substream(10).seed();
        const SnrSpec spec = SnrSpec::mixed(config.snr_grid_db);
        save_dataset(out_dir / "train_snrmixed.ndst", generate_dataset(config, Split::Train, spec, seed));
        save_dataset(out_dir / "val_snrmixed.ndst", generate_dataset(config, Split::Val, spec, seed));
        save_dataset(out_dir / "test_snrmixed.ndst", generate_dataset(config, Split::Test, spec, seed));
    }
    else
    {
        for (std::size_t idx = 0; idx < config.snr_grid_db.size(); ++idx)
        {
            const double snr_db = config.snr_grid_db[idx];
            const std::uint64_t point_seed = Rng(config.training.seed).substream(10 + idx).seed();
            const std::string tag = snr_tag(snr_db);
            save_dataset(out_dir / ("train_snr" + tag + ".ndst"),
                         generate_dataset(config, Split::Train, SnrSpec::fixed(snr_db), point_seed));
            save_dataset(out_dir / ("val_snr" + tag + ".ndst"),
                         generate_dataset(config, Split::Val, SnrSpec::fixed(snr_db), point_seed));
            save_dataset(out_dir / ("test_snr" + tag + ".ndst"),
                         generate_dataset(config, Split::Test, SnrSpec::fixed(snr_db), point_seed));
        }
    }
    write_manifest(out_dir, "generate", config);
}

void train_from_files(const ExperimentConfig &config, const std::filesystem::path &out_dir, double snr_db)
{
    const std::string tag = dataset_tag(config, snr_db);
    const Dataset train_ds = load_dataset(out_dir / ("train_snr" + tag + ".ndst"));
    const Dataset val_ds = load_dataset(out_dir / ("val_snr" + tag + ".ndst"));
    std::vector<CMatF> train_in, train_t, val_in, val_t;
    split_io(train_ds, train_in, train_t);
    split_io(val_ds, val_in, val_t);

    const TrainResult trained = train_cnn(train_in, train_t, val_in, val_t,
                                          train_settings_from(config, config.training.seed));
    save_checkpoint(out_dir / ("model_snr" + tag + ".nchk"), trained.model);

    MetricsTable history;
    history.columns = {"epoch", "train_loss", "val_rmse"};
    for (const EpochStats &e : trained.history)
        history.add_row({std::to_string(e.epoch + 1), format_double(e.train_loss), format_double(e.val_rmse)});
    history.write_csv(out_dir / ("history_snr" + tag + ".csv"));
    write_manifest(out_dir, "train", config);
}

MetricsTable evaluate_from_files(const ExperimentConfig &config, const std::filesystem::path &out_dir,
                                 double snr_db)
{
    const std::string tag = dataset_tag(config, snr_db);
    const std::filesystem::path model_path = out_dir / ("model_snr" + tag + ".nchk");
    if (!std::filesystem::exists(model_path))
        throw std::runtime_error("evaluate: missing checkpoint " + model_path.string());
    CnnModel model = load_checkpoint(model_path);
    const Dataset train_ds = load_dataset(out_dir / ("train_snr" + tag + ".ndst"));
    const Dataset test_ds = load_dataset(out_dir / ("test_snr" + tag + ".ndst"));

    const SecondOrderStats stats = fit_second_order(cluster_pairs(train_ds));
    const MmseFilter filter = MmseFilter::from_stats(stats, 2, config.scenario.n_t);

    std::vector<const Sample *> view;
    for (const Sample &s : test_ds.samples)
        view.push_back(&s);
    const EvalTotals totals = evaluate_samples(config, view, &filter, &model);

    MetricsTable table;
    table.columns = {"method", "snr_db", "nmse"};
    const std::string snr_label = tag == "mixed" ? "mixed" : format_double(snr_db);
    table.add_row({"LS", snr_label, format_double(totals.nmse_ls)});
    table.add_row({"MMSE", snr_label, format_double(totals.nmse_mmse)});
    table.add_row({"CNN", snr_label, format_double(totals.nmse_cnn)});
    table.add_row({"CRB", snr_label, format_double(totals.crb_nmse)});
    table.write_csv(out_dir / ("eval_snr" + tag + ".csv"));
    write_manifest(out_dir, "evaluate", config);
    return table;
}

} // namespace nmce

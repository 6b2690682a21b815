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
#include "nmce/gradcheck.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace
{

struct CommonOptions
{
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool desk_scale = false;
    int jobs = 1;
};

void add_common(CLI::App *cmd, CommonOptions &opts)
{
    cmd->add_option("--config", opts.config_path, "configuration file (.cfg); defaults to the reference scenario")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "seed override")->each([&opts](const std::string &) {
        opts.seed_set = true;
    });
    cmd->add_option("--jobs", opts.jobs, "parallel sweep jobs")->check(CLI::PositiveNumber);
    cmd->add_flag("--desk-scale", opts.desk_scale, "apply the reduced desktop profile");
}

nmce::ExperimentConfig load(const CommonOptions &opts)
{
    nmce::ExperimentConfig config =
        opts.config_path.empty() ? nmce::ExperimentConfig{} : nmce::parse_config(opts.config_path);
    if (opts.desk_scale)
        nmce::apply_desk_scale(config);
    if (opts.seed_set)
        config.training.seed = opts.seed;
    return config;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"NOMA mmWave massive MIMO channel estimation experiments"};
    app.require_subcommand(1);

    CommonOptions generate_opts, train_opts, evaluate_opts, fig3_opts, fig4_opts, fig5_opts;
    double train_snr = 15.0, evaluate_snr = 15.0;
    bool train_snr_set = false, evaluate_snr_set = false;
    int gradcheck_configs = 50;

    auto *generate = app.add_subcommand("generate", "simulate per-SNR train/val/test datasets");
    add_common(generate, generate_opts);

    auto *train = app.add_subcommand("train", "train a model on generated datasets");
    add_common(train, train_opts);
    train->add_option("--snr", train_snr, "dataset SNR in dB")->each([&](const std::string &) {
        train_snr_set = true;
    });

    auto *evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on a test dataset");
    add_common(evaluate, evaluate_opts);
    evaluate->add_option("--snr", evaluate_snr, "dataset SNR in dB")->each([&](const std::string &) {
        evaluate_snr_set = true;
    });

    auto *fig3 = app.add_subcommand("fig3", "NMSE versus SNR for LS, MMSE, CNN and the CRB");
    add_common(fig3, fig3_opts);
    auto *fig4 = app.add_subcommand("fig4", "validation RMSE per epoch over the learning-rate sweep");
    add_common(fig4, fig4_opts);
    auto *fig5 = app.add_subcommand("fig5", "validation RMSE per epoch over the depth sweep");
    add_common(fig5, fig5_opts);

    auto *gradcheck = app.add_subcommand("gradcheck", "finite-difference validation of all backward passes");
    gradcheck->add_option("--configs", gradcheck_configs, "random configurations per operation")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (generate->parsed())
            nmce::generate_datasets(load(generate_opts), generate_opts.out_dir);
        else if (train->parsed())
        {
            const nmce::ExperimentConfig config = load(train_opts);
            nmce::train_from_files(config, train_opts.out_dir, train_snr_set ? train_snr : config.sweep.snr_db);
        }
        else if (evaluate->parsed())
        {
            const nmce::ExperimentConfig config = load(evaluate_opts);
            nmce::evaluate_from_files(config, evaluate_opts.out_dir,
                                      evaluate_snr_set ? evaluate_snr : config.sweep.snr_db);
        }
        else if (fig3->parsed())
            nmce::run_fig3(load(fig3_opts), fig3_opts.out_dir, fig3_opts.jobs);
        else if (fig4->parsed())
            nmce::run_fig4(load(fig4_opts), fig4_opts.out_dir, fig4_opts.jobs);
        else if (fig5->parsed())
            nmce::run_fig5(load(fig5_opts), fig5_opts.out_dir, fig5_opts.jobs);
        else if (gradcheck->parsed())
        {
            const nmce::GradCheckReport report = nmce::run_gradient_checks(gradcheck_configs);
            std::cout << report.summary();
            return report.all_pass() ? 0 : 1;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

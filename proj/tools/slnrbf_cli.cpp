// SPDX-License-Identifier: Apache-2.0
//
// slnrbf - statistical SLNR-based beamforming for full-dimensional massive MIMO
// Copyright (C) 2026 The slnrbf authors
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


// slnrbf command line: scenario generation, single runs, sweeps and reports.

#include "slnrbf/slnrbf.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

using namespace slnrbf;

struct Flags {
    std::string config;
    std::string algorithm;
    int Q = 4;
    int users = 3;
    int M = 1;
    double power_dbm = 24.0;
    double c = 0.1;
    std::uint64_t seed = 1;
    int seeds = 1;
    std::string out;
    std::size_t mc_samples = kFallbackSamples;
};

struct Options {
    CLI::Option *config = nullptr;
    CLI::Option *algorithm = nullptr;
    CLI::Option *Q = nullptr;
    CLI::Option *users = nullptr;
    CLI::Option *M = nullptr;
    CLI::Option *power = nullptr;
    CLI::Option *c = nullptr;
    CLI::Option *seed = nullptr;
    CLI::Option *seeds = nullptr;
    CLI::Option *out = nullptr;
    CLI::Option *mc = nullptr;
};

Options add_flags(CLI::App *app, Flags &f) {
    Options o;
    o.config = app->add_option("--config", f.config, "experiment config JSON")->check(CLI::ExistingFile);
    o.algorithm = app->add_option("--algorithm", f.algorithm, "maxmin | gm | soft | baseline")
                      ->check(CLI::IsMember({"maxmin", "gm", "soft", "baseline"}));
    o.Q = app->add_option("--Q", f.Q, "antennas per array side")->check(CLI::PositiveNumber);
    o.users = app->add_option("--users", f.users, "number of users")->check(CLI::PositiveNumber);
    o.M = app->add_option("--M", f.M, "outer products per beamformer")->check(CLI::PositiveNumber);
    o.power = app->add_option("--power-dbm", f.power_dbm, "transmit power budget in dBm");
    o.c = app->add_option("--c", f.c, "soft max-min coefficient")->check(CLI::PositiveNumber);
    o.seed = app->add_option("--seed", f.seed, "first drop seed");
    o.seeds = app->add_option("--seeds", f.seeds, "number of drops")->check(CLI::PositiveNumber);
    o.out = app->add_option("--out", f.out, "output directory (file for scenario gen)");
    o.mc = app->add_option("--mc-samples", f.mc_samples, "Monte Carlo samples for rate fallbacks")
               ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
    return o;
}

/// Config file (if given) with any explicit flags layered on top.
ExperimentConfig resolve(const Flags &f, const Options &o) {
    ExperimentConfig cfg;
    if (o.config->count())
        cfg = load_config(f.config);
    else {
        cfg.antennas = {16};
        cfg.power_dbm = {24.0};
    }
    if (o.algorithm->count())
        cfg.algorithms = {parse_algorithm(f.algorithm)};
    if (o.Q->count()) {
        cfg.scenario.Q = f.Q;
        cfg.antennas = {f.Q * f.Q};
    }
    if (o.users->count())
        cfg.scenario.L = f.users;
    if (o.M->count())
        cfg.scenario.M = f.M;
    if (o.power->count()) {
        cfg.scenario.power_w = dbm_to_watt(f.power_dbm);
        cfg.power_dbm = {f.power_dbm};
    }
    if (o.c->count())
        cfg.c = {f.c};
    if (o.seed->count())
        cfg.scenario.seed = f.seed;
    if (o.seeds->count())
        cfg.n_seeds = f.seeds;
    if (o.out->count())
        cfg.output_dir = f.out;
    if (o.mc->count())
        cfg.mc_samples = f.mc_samples;
    return cfg;
}

void print_files(const ExperimentOutput &out) {
    for (const auto &p : out.files)
        std::cout << p.string() << "\n";
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"slnrbf: statistical SLNR beamforming experiments"};
    app.require_subcommand(1);

    Flags gen_flags, run_flags, sweep_flags, report_flags;
    auto *scenario = app.add_subcommand("scenario", "scenario utilities");
    scenario->require_subcommand(1);
    auto *gen = scenario->add_subcommand("gen", "place users and print the scenario with its geometry as JSON");
    const Options gen_opts = add_flags(gen, gen_flags);
    auto *run = app.add_subcommand("run", "one algorithm at one sweep point");
    const Options run_opts = add_flags(run, run_flags);
    auto *sweep = app.add_subcommand("sweep", "every algorithm and sweep point of a config");
    const Options sweep_opts = add_flags(sweep, sweep_flags);
    sweep_opts.config->required();
    auto *report = app.add_subcommand("report", "fairness table from summary files");
    const Options report_opts = add_flags(report, report_flags);
    report_opts.out->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (*gen) {
            ExperimentConfig cfg = resolve(gen_flags, gen_opts);
            Scenario s = cfg.scenario;
            s.power_w = dbm_to_watt(cfg.power_dbm.front());
            s.validate();
            Rng rng(s.seed);
            json doc{{"scenario", s}, {"users", place_users(s, rng)}};
            if (gen_opts.out->count())
                write_text(gen_flags.out, doc.dump(2) + "\n");
            else
                std::cout << doc.dump(2) << "\n";
            return 0;
        }
        if (*run) {
            ExperimentConfig cfg = resolve(run_flags, run_opts);
            if (cfg.algorithms.size() != 1)
                throw std::invalid_argument("run needs exactly one --algorithm");
            if (cfg.points().size() != 1)
                throw std::invalid_argument("run covers one sweep point; use sweep for several");
            print_files(run_experiment(cfg));
            return 0;
        }
        if (*sweep) {
            print_files(run_experiment(resolve(sweep_flags, sweep_opts)));
            return 0;
        }
        if (*report) {
            std::vector<fs::path> files;
            if (report_opts.config->count()) {
                ExperimentConfig cfg = resolve(report_flags, report_opts);
                files = summary_paths(cfg);
            } else {
                files = find_summaries(report_flags.out);
                if (files.empty())
                    throw std::runtime_error("report: missing summary files, none match " +
                                             (fs::path(report_flags.out) / "summary_*.csv").string());
            }
            const std::string table = report_fairness(files);
            write_text(fs::path(report_flags.out) / "fairness.csv", table);
            std::cout << table;
            return 0;
        }
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

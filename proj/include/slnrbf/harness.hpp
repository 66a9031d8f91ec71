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


// Experiment orchestration and CSV reporting.
//
// Config JSON (every key optional except where noted):
//
//   {
//     "scenario":   { "Q": 4, "L": 3, "M": 1, "power_dbm": 24, "noise_dbm_hz": -174,
//                     "bandwidth_hz": 1e7, "carrier_hz": 2e9, "cell_radius_m": 200,
//                     "min_radius_m": 10, "bs_height_m": 10, "ue_height_m": 1.5,
//                     "shadow_db": 7.8, "azimuth_spread_deg": 5, "elevation_spread_deg": 5,
//                     "seed": 1 },
//     "algorithms": ["maxmin", "gm", "soft", "baseline"],   (required)
//     "antennas":   [16, 64],      perfect squares Q^2; default [scenario.Q^2]
//     "power_dbm":  [24],          default [scenario.power_dbm]
//     "c":          [0.1],         soft max-min coefficient; ignored by the others
//     "n_seeds":    20,
//     "output_dir": "out",
//     "mc_samples": 100000,
//     "rate_eval":  "closed" | "monte_carlo",
//     "tolerance": 1e-3, "max_iterations": 200, "rate_every": 1
//   }
//
// Drop s (0-based) uses scenario seed base + s for both the user placement and
// the initial beamformers, so every algorithm sees the same drops.
//
// Output files, floats with 17 significant digits:
//
//   trace_<tag>.csv    iteration,half,min_slnr,objective,min_rate_mbps,power,step,
//                      weight_product,subproblem_gap   (min_rate_mbps empty when
//                      not evaluated on that half-iteration)
//   summary_<tag>.csv  algorithm,antennas,Q,M,users,power_dbm,c,seed,scope,user,
//                      slnr,rate_mbps,min_rate_mbps,max_rate_mbps,min_max_ratio,
//                      jain,min_slnr,final_min_slnr,iterations,converged,wallclock_s
//                      one row per user (scope=user) and one aggregate row
//                      (scope=all); per-user columns are empty on the aggregate
//                      row and aggregate columns empty on user rows
//   aggregate.csv      algorithm,antennas,power_dbm,c,seeds, then mean_ and se_
//                      (standard error over seeds) of min_rate_mbps,
//                      max_rate_mbps, min_max_ratio, jain, min_slnr,
//                      final_min_slnr, and mean_wallclock_s
//
// with <tag> = <algorithm>_N<antennas>_P<power_dbm>_c<c>_s<seed>.
//
// The worker count comes from SLNRBF_WORKERS (default: hardware threads).

#pragma once

#include "slnrbf/beamformer.hpp"
#include "slnrbf/channel.hpp"
#include "slnrbf/metrics.hpp"
#include "slnrbf/optimizers.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace slnrbf {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---------------------------------------------------------------- JSON forms

inline void to_json(json &j, const Scenario &s) {
    j = json{{"Q", s.Q},
             {"L", s.L},
             {"M", s.M},
             {"power_dbm", watt_to_dbm(s.power_w)},
             {"noise_power_w", s.sigma_w},
             {"bandwidth_hz", s.bandwidth_hz},
             {"carrier_hz", s.carrier_hz},
             {"cell_radius_m", s.cell_radius_m},
             {"min_radius_m", s.min_radius_m},
             {"bs_height_m", s.bs_height_m},
             {"ue_height_m", s.ue_height_m},
             {"shadow_db", s.sigma_sf_db},
             {"azimuth_spread_deg", s.sigma_alpha_rad * 180.0 / std::numbers::pi},
             {"elevation_spread_deg", s.sigma_beta_rad * 180.0 / std::numbers::pi},
             {"seed", s.seed}};
}

inline void from_json(const json &j, Scenario &s) {
    Scenario d;
    s.Q = j.value("Q", d.Q);
    s.L = j.value("L", d.L);
    s.M = j.value("M", d.M);
    s.power_w = j.contains("power_dbm") ? dbm_to_watt(j.at("power_dbm").get<double>()) : d.power_w;
    s.bandwidth_hz = j.value("bandwidth_hz", d.bandwidth_hz);
    if (j.contains("noise_power_w"))
        s.sigma_w = j.at("noise_power_w").get<double>();
    else
        s.sigma_w = noise_power_w(j.value("noise_dbm_hz", -174.0), s.bandwidth_hz);
    s.carrier_hz = j.value("carrier_hz", d.carrier_hz);
    s.cell_radius_m = j.value("cell_radius_m", d.cell_radius_m);
    s.min_radius_m = j.value("min_radius_m", d.min_radius_m);
    s.bs_height_m = j.value("bs_height_m", d.bs_height_m);
    s.ue_height_m = j.value("ue_height_m", d.ue_height_m);
    s.sigma_sf_db = j.value("shadow_db", d.sigma_sf_db);
    s.sigma_alpha_rad = deg_to_rad(j.value("azimuth_spread_deg", 5.0));
    s.sigma_beta_rad = deg_to_rad(j.value("elevation_spread_deg", 5.0));
    s.seed = j.value("seed", d.seed);
}

inline void to_json(json &j, const UserGeometry &g) {
    j = json{{"distance_m", g.distance_m},
             {"azimuth_rad", g.azimuth_rad},
             {"elevation_rad", g.elevation_rad},
             {"shadow_db", g.shadow_db},
             {"path_gain", g.path_gain}};
}

inline json complex_array(const CVector &v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(json::array({v(i).real(), v(i).imag()}));
    return out;
}

inline CVector complex_vector(const json &j) {
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto &pair = j.at(i);
        if (!pair.is_array() || pair.size() != 2)
            throw std::invalid_argument("beamformer JSON: entries must be [re, im] pairs");
        v(static_cast<Eigen::Index>(i)) = cplx(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    return v;
}

inline void to_json(json &j, const BeamformerSet &set) {
    j = json{{"Q", set.Q}, {"M", set.M}, {"L", set.L}, {"azimuth", json::array()}, {"elevation", json::array()}};
    for (int l = 0; l < set.L; ++l) {
        j["azimuth"].push_back(complex_array(set.azimuth[static_cast<std::size_t>(l)]));
        j["elevation"].push_back(complex_array(set.elevation[static_cast<std::size_t>(l)]));
    }
}

inline void from_json(const json &j, BeamformerSet &set) {
    set = BeamformerSet(j.at("Q").get<int>(), j.at("M").get<int>(), j.at("L").get<int>());
    for (const char *key : {"azimuth", "elevation"}) {
        const auto &users = j.at(key);
        if (users.size() != static_cast<std::size_t>(set.L))
            throw std::invalid_argument(std::string("beamformer JSON: wrong number of ") + key + " vectors");
        auto &target = std::string(key) == "azimuth" ? set.azimuth : set.elevation;
        for (int l = 0; l < set.L; ++l) {
            target[static_cast<std::size_t>(l)] = complex_vector(users.at(static_cast<std::size_t>(l)));
            if (target[static_cast<std::size_t>(l)].size() != set.Q * set.M)
                throw std::invalid_argument("beamformer JSON: vector length must be Q*M");
        }
    }
}

// ---------------------------------------------------------------- config

struct SweepPoint {
    int antennas = 16;
    double power_dbm = 24.0;
    double c = 0.1;

    int Q() const { return static_cast<int>(std::lround(std::sqrt(static_cast<double>(antennas)))); }
};

struct ExperimentConfig {
    Scenario scenario;
    std::vector<Algorithm> algorithms;
    std::vector<int> antennas;
    std::vector<double> power_dbm;
    std::vector<double> c{0.1};
    int n_seeds = 1;
    std::string output_dir = "out";
    std::size_t mc_samples = kFallbackSamples;
    RateMethod rate_eval = RateMethod::closed;
    double tolerance = 1e-3;
    int max_iterations = 200;
    int rate_every = 1;

    void validate() const {
        if (algorithms.empty())
            throw std::invalid_argument("config: at least one algorithm is required");
        if (antennas.empty() || power_dbm.empty() || c.empty())
            throw std::invalid_argument("config: sweep axes must be nonempty");
        for (int n : antennas) {
            const int q = static_cast<int>(std::lround(std::sqrt(static_cast<double>(std::max(n, 0)))));
            if (n <= 0 || q * q != n)
                throw std::invalid_argument("config: antenna counts must be positive perfect squares, got " +
                                            std::to_string(n));
        }
        for (double x : c)
            if (!(x > 0.0))
                throw std::invalid_argument("config: c values must be positive");
        for (double p : power_dbm)
            if (!std::isfinite(p))
                throw std::invalid_argument("config: power_dbm values must be finite");
        if (n_seeds < 1)
            throw std::invalid_argument("config: n_seeds must be >= 1");
        if (output_dir.empty())
            throw std::invalid_argument("config: output_dir must be nonempty");
        options_for(SweepPoint{antennas.front(), power_dbm.front(), c.front()}, 0).validate();
        for (const auto &p : points()) {
            Scenario s = scenario_for(p, 0);
            s.validate();
        }
    }

    std::vector<SweepPoint> points() const {
        std::vector<SweepPoint> out;
        for (int n : antennas)
            for (double p : power_dbm)
                for (double x : c)
                    out.push_back({n, p, x});
        return out;
    }

    Scenario scenario_for(const SweepPoint &p, int seed_index) const {
        Scenario s = scenario;
        s.Q = p.Q();
        s.power_w = dbm_to_watt(p.power_dbm);
        s.seed = scenario.seed + static_cast<std::uint64_t>(seed_index);
        return s;
    }

    AlgoOptions options_for(const SweepPoint &p, int seed_index) const {
        AlgoOptions o;
        o.tolerance = tolerance;
        o.max_iterations = max_iterations;
        o.soft_c = p.c;
        o.rate_eval = rate_eval;
        o.mc_samples = mc_samples;
        o.seed = scenario.seed + static_cast<std::uint64_t>(seed_index);
        o.rate_every = rate_every;
        return o;
    }
};

inline void from_json(const json &j, ExperimentConfig &cfg) {
    cfg = ExperimentConfig{};
    if (j.contains("scenario"))
        cfg.scenario = j.at("scenario").get<Scenario>();
    if (!j.contains("algorithms"))
        throw std::invalid_argument("config: missing 'algorithms'");
    for (const auto &a : j.at("algorithms"))
        cfg.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    cfg.antennas = j.value("antennas", std::vector<int>{cfg.scenario.Q * cfg.scenario.Q});
    cfg.power_dbm = j.value("power_dbm", std::vector<double>{watt_to_dbm(cfg.scenario.power_w)});
    cfg.c = j.value("c", std::vector<double>{0.1});
    cfg.n_seeds = j.value("n_seeds", 1);
    cfg.output_dir = j.value("output_dir", std::string("out"));
    cfg.mc_samples = j.value("mc_samples", kFallbackSamples);
    const std::string rate = j.value("rate_eval", std::string("closed"));
    if (rate == "closed")
        cfg.rate_eval = RateMethod::closed;
    else if (rate == "monte_carlo")
        cfg.rate_eval = RateMethod::monte_carlo;
    else
        throw std::invalid_argument("config: rate_eval must be 'closed' or 'monte_carlo'");
    cfg.tolerance = j.value("tolerance", 1e-3);
    cfg.max_iterations = j.value("max_iterations", 200);
    cfg.rate_every = j.value("rate_every", 1);
}

inline void to_json(json &j, const ExperimentConfig &cfg) {
    json algorithms = json::array();
    for (Algorithm a : cfg.algorithms)
        algorithms.push_back(std::string(to_string(a)));
    j = json{{"scenario", cfg.scenario},
             {"algorithms", algorithms},
             {"antennas", cfg.antennas},
             {"power_dbm", cfg.power_dbm},
             {"c", cfg.c},
             {"n_seeds", cfg.n_seeds},
             {"output_dir", cfg.output_dir},
             {"mc_samples", cfg.mc_samples},
             {"rate_eval", cfg.rate_eval == RateMethod::closed ? "closed" : "monte_carlo"},
             {"tolerance", cfg.tolerance},
             {"max_iterations", cfg.max_iterations},
             {"rate_every", cfg.rate_every}};
}

inline ExperimentConfig load_config(const fs::path &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception &e) {
        throw std::invalid_argument("config " + path.string() + ": " + e.what());
    }
    auto cfg = j.get<ExperimentConfig>();
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------- CSV

inline std::string fmt17(double x) {
    if (std::isnan(x))
        return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Shortest %g form, for file names and table headers.
inline std::string fmt_short(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

inline std::string run_tag(Algorithm a, const SweepPoint &p, std::uint64_t seed) {
    return std::string(to_string(a)) + "_N" + std::to_string(p.antennas) + "_P" + fmt_short(p.power_dbm) + "_c" +
           fmt_short(p.c) + "_s" + std::to_string(seed);
}

inline const std::vector<std::string> &trace_columns() {
    static const std::vector<std::string> cols{"iteration", "half", "min_slnr", "objective", "min_rate_mbps",
                                               "power", "step", "weight_product", "subproblem_gap"};
    return cols;
}

inline const std::vector<std::string> &summary_columns() {
    static const std::vector<std::string> cols{
        "algorithm", "antennas",      "Q",    "M",        "users",          "power_dbm",  "c",
        "seed",      "scope",         "user", "slnr",     "rate_mbps",      "min_rate_mbps",
        "max_rate_mbps", "min_max_ratio", "jain", "min_slnr", "final_min_slnr", "iterations", "converged",
        "wallclock_s"};
    return cols;
}

inline const std::vector<std::string> &aggregate_metrics() {
    static const std::vector<std::string> cols{"min_rate_mbps", "max_rate_mbps", "min_max_ratio",
                                               "jain",          "min_slnr",      "final_min_slnr"};
    return cols;
}

inline std::string join(const std::vector<std::string> &fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out += ',';
        out += fields[i];
    }
    return out;
}

inline std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

/// Header-keyed rows of a CSV file.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::map<std::string, std::string>> rows;
};

inline CsvTable read_csv(const fs::path &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path.string() + ": empty file");
    t.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != t.header.size())
            throw std::runtime_error(path.string() + ": ragged row");
        std::map<std::string, std::string> row;
        for (std::size_t i = 0; i < fields.size(); ++i)
            row[t.header[i]] = fields[i];
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

// ---------------------------------------------------------------- experiment

struct RunSummary {
    Algorithm algorithm = Algorithm::maxmin;
    SweepPoint point;
    std::uint64_t seed = 0;
    RateReport report;
    double final_min_slnr = 0.0;
    int iterations = 0;
    bool converged = false;
    double wallclock_s = 0.0;
    std::string failure;
};

inline std::string trace_csv(const OptimizationResult &r, double bandwidth_hz) {
    std::string out = join(trace_columns()) + "\n";
    for (const auto &e : r.traces) {
        out += join({std::to_string(e.iteration), std::to_string(e.half), fmt17(e.min_slnr), fmt17(e.objective),
                     std::isnan(e.min_rate_nats) ? "" : fmt17(nats_to_mbps(e.min_rate_nats, bandwidth_hz)),
                     fmt17(e.power), fmt17(e.step), fmt17(e.weight_product), fmt17(e.subproblem_gap)});
        out += "\n";
    }
    return out;
}

inline std::string summary_csv(const RunSummary &s, const Scenario &scenario) {
    const std::vector<std::string> meta{std::string(to_string(s.algorithm)), std::to_string(s.point.antennas),
                                        std::to_string(scenario.Q),         std::to_string(scenario.M),
                                        std::to_string(scenario.L),         fmt17(s.point.power_dbm),
                                        fmt17(s.point.c),                   std::to_string(s.seed)};
    auto row = [&](std::vector<std::string> tail) {
        std::vector<std::string> fields = meta;
        fields.insert(fields.end(), tail.begin(), tail.end());
        return join(fields) + "\n";
    };
    std::string out = join(summary_columns()) + "\n";
    const auto &r = s.report;
    for (std::size_t l = 0; l < r.slnr.size(); ++l)
        out += row({"user", std::to_string(l), fmt17(r.slnr[l]), fmt17(r.rate_mbps[l]), "", "", "", "", "", "", "",
                    "", ""});
    out += row({"all", "", "", "", fmt17(r.min_rate_mbps), fmt17(r.max_rate_mbps), fmt17(r.min_max_ratio),
                fmt17(r.jain), fmt17(r.min_slnr), fmt17(s.final_min_slnr), std::to_string(s.iterations),
                s.converged ? "1" : "0", fmt17(s.wallclock_s)});
    return out;
}

/// Runs one (algorithm, point, seed) cell and evaluates its incumbent.
inline RunSummary run_cell(const ExperimentConfig &cfg, Algorithm algorithm, const SweepPoint &point, int seed_index,
                           OptimizationResult *result_out = nullptr) {
    const Scenario scenario = cfg.scenario_for(point, seed_index);
    const AlgoOptions options = cfg.options_for(point, seed_index);
    const auto start = std::chrono::steady_clock::now();
    const ChannelStatistics stats = generate_statistics(scenario);
    OptimizationResult result = run_algorithm(algorithm, scenario, stats, options);
    RunSummary s;
    s.algorithm = algorithm;
    s.point = point;
    s.seed = scenario.seed;
    s.report = rate_report(result.incumbent_precoder, stats, scenario.bandwidth_hz, options.rate_eval,
                           options.mc_samples);
    s.final_min_slnr = algorithm == Algorithm::baseline ? s.report.min_slnr : result.traces.back().min_slnr;
    s.iterations = result.iterations;
    s.converged = result.converged;
    s.failure = result.failure;
    s.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (result_out)
        *result_out = std::move(result);
    return s;
}

inline int worker_count() {
    if (const char *env = std::getenv("SLNRBF_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1)
            return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Fails unless files can be created in dir (creating dir if needed).
inline void ensure_writable(const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("output directory " + dir.string() + " cannot be created");
    const fs::path probe = dir / ".slnrbf_write_probe";
    {
        std::ofstream out(probe);
        if (!out)
            throw std::runtime_error("output directory " + dir.string() + " is not writable");
    }
    fs::remove(probe, ec);
}

struct ExperimentOutput {
    std::vector<RunSummary> runs; // ordered by (algorithm, point, seed)
    std::vector<fs::path> files;
};

inline std::string aggregate_csv(const ExperimentConfig &cfg, const std::vector<RunSummary> &runs) {
    std::vector<std::string> header{"algorithm", "antennas", "power_dbm", "c", "seeds"};
    for (const auto &m : aggregate_metrics()) {
        header.push_back("mean_" + m);
        header.push_back("se_" + m);
    }
    header.push_back("mean_wallclock_s");
    std::string out = join(header) + "\n";
    const auto n = static_cast<std::size_t>(cfg.n_seeds);
    for (std::size_t first = 0; first < runs.size(); first += n) {
        const RunSummary &head = runs[first];
        std::vector<std::string> fields{std::string(to_string(head.algorithm)), std::to_string(head.point.antennas),
                                        fmt17(head.point.power_dbm), fmt17(head.point.c), std::to_string(n)};
        auto metric = [](const RunSummary &s, const std::string &m) {
            if (m == "min_rate_mbps")
                return s.report.min_rate_mbps;
            if (m == "max_rate_mbps")
                return s.report.max_rate_mbps;
            if (m == "min_max_ratio")
                return s.report.min_max_ratio;
            if (m == "jain")
                return s.report.jain;
            if (m == "min_slnr")
                return s.report.min_slnr;
            return s.final_min_slnr;
        };
        for (const auto &m : aggregate_metrics()) {
            double sum = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                sum += metric(runs[first + k], m);
            const double mean = sum / static_cast<double>(n);
            double ss = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                ss += (metric(runs[first + k], m) - mean) * (metric(runs[first + k], m) - mean);
            const double se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
            fields.push_back(fmt17(mean));
            fields.push_back(fmt17(se));
        }
        double wall = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            wall += runs[first + k].wallclock_s;
        fields.push_back(fmt17(wall / static_cast<double>(n)));
        out += join(fields) + "\n";
    }
    return out;
}

/// Runs every (algorithm, point, seed) cell on a worker pool and writes the
/// trace, summary and aggregate CSV files into cfg.output_dir.
inline ExperimentOutput run_experiment(const ExperimentConfig &cfg) {
    cfg.validate();
    const fs::path dir(cfg.output_dir);
    ensure_writable(dir);

    struct Job {
        Algorithm algorithm;
        SweepPoint point;
        int seed_index;
    };
    std::vector<Job> jobs;
    for (Algorithm a : cfg.algorithms)
        for (const auto &p : cfg.points())
            for (int s = 0; s < cfg.n_seeds; ++s)
                jobs.push_back({a, p, s});

    ExperimentOutput output;
    output.runs.resize(jobs.size());
    std::vector<std::vector<fs::path>> written(jobs.size());
    std::vector<std::string> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job &job = jobs[i];
            try {
                OptimizationResult result;
                RunSummary s = run_cell(cfg, job.algorithm, job.point, job.seed_index, &result);
                const Scenario scenario = cfg.scenario_for(job.point, job.seed_index);
                const std::string tag = run_tag(job.algorithm, job.point, s.seed);
                const fs::path trace = dir / ("trace_" + tag + ".csv");
                const fs::path summary = dir / ("summary_" + tag + ".csv");
                write_text(trace, trace_csv(result, scenario.bandwidth_hz));
                write_text(summary, summary_csv(s, scenario));
                written[i] = {trace, summary};
                output.runs[i] = std::move(s);
            } catch (const std::exception &e) {
                errors[i] = e.what();
            }
        }
    };
    const int n_workers = std::min<int>(worker_count(), static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    for (int w = 1; w < n_workers; ++w)
        pool.emplace_back(work);
    work();
    for (auto &t : pool)
        t.join();

    for (std::size_t i = 0; i < jobs.size(); ++i)
        if (!errors[i].empty())
            throw std::runtime_error("run " + run_tag(jobs[i].algorithm, jobs[i].point,
                                                      cfg.scenario.seed + static_cast<std::uint64_t>(jobs[i].seed_index)) +
                                     " failed: " + errors[i]);
    for (auto &w : written)
        output.files.insert(output.files.end(), w.begin(), w.end());
    const fs::path aggregate = dir / "aggregate.csv";
    write_text(aggregate, aggregate_csv(cfg, output.runs));
    output.files.push_back(aggregate);
    return output;
}

/// Expected summary files of a config, in job order.
inline std::vector<fs::path> summary_paths(const ExperimentConfig &cfg) {
    std::vector<fs::path> out;
    for (Algorithm a : cfg.algorithms)
        for (const auto &p : cfg.points())
            for (int s = 0; s < cfg.n_seeds; ++s)
                out.push_back(fs::path(cfg.output_dir) /
                              ("summary_" + run_tag(a, p, cfg.scenario.seed + static_cast<std::uint64_t>(s)) + ".csv"));
    return out;
}

/// summary_*.csv files in dir, sorted by name.
inline std::vector<fs::path> find_summaries(const fs::path &dir) {
    std::vector<fs::path> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        return out;
    for (const auto &entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("summary_", 0) == 0 && entry.path().extension() == ".csv")
            out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Fairness table: one row per algorithm, and for each antenna count (ascending)
/// the min/max rate ratio and Jain index averaged over every summary for that
/// (algorithm, antennas) pair.
inline std::string report_fairness(const std::vector<fs::path> &summaries) {
    if (summaries.empty())
        throw std::runtime_error("report: no summary files given (expected summary_*.csv)");
    std::vector<std::string> missing;
    for (const auto &p : summaries)
        if (!fs::is_regular_file(p))
            missing.push_back(p.string());
    if (!missing.empty()) {
        std::string msg = "report: missing summary files:";
        for (const auto &m : missing)
            msg += " " + m;
        throw std::runtime_error(msg);
    }

    struct Acc {
        double ratio = 0.0;
        double jain = 0.0;
        int n = 0;
    };
    std::map<std::string, std::map<int, Acc>> table;
    std::vector<std::string> order;
    std::vector<int> antennas;
    for (const auto &p : summaries) {
        const CsvTable t = read_csv(p);
        bool found = false;
        for (const auto &row : t.rows) {
            if (row.at("scope") != "all")
                continue;
            found = true;
            const std::string alg = row.at("algorithm");
            const int n = std::stoi(row.at("antennas"));
            if (std::find(order.begin(), order.end(), alg) == order.end())
                order.push_back(alg);
            if (std::find(antennas.begin(), antennas.end(), n) == antennas.end())
                antennas.push_back(n);
            Acc &acc = table[alg][n];
            acc.ratio += std::strtod(row.at("min_max_ratio").c_str(), nullptr);
            acc.jain += std::strtod(row.at("jain").c_str(), nullptr);
            ++acc.n;
        }
        if (!found)
            throw std::runtime_error("report: " + p.string() + " has no aggregate row");
    }
    std::sort(antennas.begin(), antennas.end());

    std::vector<std::string> header{"algorithm"};
    for (int n : antennas)
        header.push_back("min_max_ratio_" + std::to_string(n));
    for (int n : antennas)
        header.push_back("jain_" + std::to_string(n));
    std::string out = join(header) + "\n";
    for (const auto &alg : order) {
        std::vector<std::string> fields{alg};
        for (int pass = 0; pass < 2; ++pass)
            for (int n : antennas) {
                const auto it = table[alg].find(n);
                if (it == table[alg].end()) {
                    fields.emplace_back();
                    continue;
                }
                const Acc &a = it->second;
                fields.push_back(fmt17((pass == 0 ? a.ratio : a.jain) / a.n));
            }
        out += join(fields) + "\n";
    }
    return out;
}

} // namespace slnrbf

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


#pragma once

#include "slnrbf/beamformer.hpp"
#include "slnrbf/channel.hpp"
#include "slnrbf/closed_form.hpp"
#include "slnrbf/metrics.hpp"
#include "slnrbf/qcqp.hpp"
#include "slnrbf/surrogates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slnrbf {

enum class Algorithm { maxmin, gm, soft, baseline };

inline constexpr std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::maxmin:
        return "maxmin";
    case Algorithm::gm:
        return "gm";
    case Algorithm::soft:
        return "soft";
    case Algorithm::baseline:
        return "baseline";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
    for (Algorithm a : {Algorithm::maxmin, Algorithm::gm, Algorithm::soft, Algorithm::baseline})
        if (name == to_string(a))
            return a;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

struct AlgoOptions {
    double tolerance = 1e-3;
    int max_iterations = 200;
    double soft_c = 0.1;
    RateMethod rate_eval = RateMethod::closed;
    std::size_t mc_samples = kFallbackSamples;
    std::uint64_t seed = 1; // initial beamformers
    int rate_every = 1;     // evaluate the incumbent rate every k half-iterations
    double qcqp_tol = 1e-5;

    void validate() const {
        if (!(tolerance > 0.0))
            throw std::invalid_argument("options: tolerance must be positive");
        if (max_iterations < 1)
            throw std::invalid_argument("options: max_iterations must be >= 1");
        if (!(soft_c > 0.0))
            throw std::invalid_argument("options: soft_c must be positive");
        if (rate_every < 1)
            throw std::invalid_argument("options: rate_every must be >= 1");
        if (mc_samples < 2)
            throw std::invalid_argument("options: mc_samples must be >= 2");
    }
};

/// One record per half-iteration (iteration 0 is the initial point).
struct TraceEntry {
    int iteration = 0;
    int half = 0;                 // 0 azimuth, 1 elevation
    double min_slnr = 0.0;
    double objective = 0.0;       // the algorithm's driving objective
    double min_rate_nats = std::numeric_limits<double>::quiet_NaN(); // NaN when not evaluated
    double power = 0.0;
    double step = 1.0;            // accepted fraction of the surrogate step (0 = rejected)
    double weight_product = 1.0;  // product of the GM weights in force
    double subproblem_gap = 0.0;  // certified relative gap of the max-min subproblem
    bool reinitialized = false;   // a degenerate user was redrawn before this step
};

struct OptimizationResult {
    Algorithm algorithm = Algorithm::maxmin;
    BeamformerSet incumbent;      // best set by minimum ergodic rate
    Precoder incumbent_precoder;  // vec(V_l) of the incumbent
    BeamformerSet final_set;      // last iterate
    double rate_min_nats = -std::numeric_limits<double>::infinity();
    std::vector<TraceEntry> traces;
    int iterations = 0;
    bool converged = false;
    int reinitializations = 0;
    std::string failure; // nonempty if a subsolver aborted the run

    bool has_incumbent() const { return std::isfinite(rate_min_nats); }
};

inline double evaluate_min_rate(const Precoder &precoder, const ChannelStatistics &stats, const AlgoOptions &options) {
    return min_ergodic_rate(precoder, stats, options.rate_eval, options.mc_samples);
}

/// Replaces the incumbent iff the candidate's minimum rate strictly exceeds it.
inline bool track_incumbent(OptimizationResult &result, const BeamformerSet &candidate, double candidate_rate) {
    if (!(candidate_rate > result.rate_min_nats))
        return false;
    result.rate_min_nats = candidate_rate;
    result.incumbent = candidate;
    result.incumbent_precoder = vectorize(candidate);
    return true;
}

inline bool track_incumbent(OptimizationResult &result, const BeamformerSet &candidate, const ChannelStatistics &stats,
                            const AlgoOptions &options = {}) {
    return track_incumbent(result, candidate, evaluate_min_rate(vectorize(candidate), stats, options));
}

namespace detail {

/// Objective value and whether larger is better.
struct Driving {
    std::function<double(const std::vector<double> &)> value;
    bool maximize = true;

    bool improves(double candidate, double current) const {
        return maximize ? candidate >= current : candidate <= current;
    }
};

inline Driving driving_objective(Algorithm algorithm, double soft_c) {
    switch (algorithm) {
    case Algorithm::maxmin:
        return {[](const std::vector<double> &g) { return *std::min_element(g.begin(), g.end()); }, true};
    case Algorithm::gm:
        return {[](const std::vector<double> &g) { return gm_objective(g); }, true};
    case Algorithm::soft:
        return {[soft_c](const std::vector<double> &g) { return soft_objective(g, soft_c); }, false};
    case Algorithm::baseline:
        break;
    }
    throw std::invalid_argument("driving_objective: no iterative objective for the baseline");
}

/// Redraws any user whose signal power is exactly zero at 1% of the budget,
/// shrinking the others if the budget would be exceeded.
inline int reinitialize_degenerate(BeamformerSet &set, const ChannelStatistics &stats, double budget, Rng &rng) {
    const auto model = build_side_model(Side::azimuth, set, stats, budget);
    std::vector<int> bad;
    for (int l = 0; l < set.L; ++l)
        if (!(model.signal_power(l, set.azimuth[static_cast<std::size_t>(l)]) > 0.0))
            bad.push_back(l);
    if (bad.empty())
        return 0;
    for (int l : bad) {
        const auto li = static_cast<std::size_t>(l);
        set.azimuth[li] = complex_gaussian(set.Q * set.M, 1, rng);
        set.elevation[li] = complex_gaussian(set.Q * set.M, 1, rng);
        const double p = full_beamformer(set, l).squaredNorm();
        set.azimuth[li] *= std::sqrt(0.01 * budget / p);
    }
    const double total = total_power(set);
    if (total > budget) {
        double others = 0.0;
        for (int l = 0; l < set.L; ++l)
            if (std::find(bad.begin(), bad.end(), l) == bad.end())
                others += full_beamformer(set, l).squaredNorm();
        const double room = budget - 0.01 * budget * static_cast<double>(bad.size());
        const double scale = others > 0.0 && room > 0.0 ? std::sqrt(room / others) : 0.0;
        for (int l = 0; l < set.L; ++l)
            if (std::find(bad.begin(), bad.end(), l) == bad.end())
                set.azimuth[static_cast<std::size_t>(l)] *= scale;
    }
    return static_cast<int>(bad.size());
}

struct HalfStep {
    std::vector<CVector> candidate;
    double gap = 0.0;
};

inline OptimizationResult run_alternating(Algorithm algorithm, const Scenario &scenario,
                                          const ChannelStatistics &stats, const AlgoOptions &options) {
    scenario.validate();
    options.validate();
    if (stats.size() != scenario.L || stats.Q != scenario.Q)
        throw std::invalid_argument("run: statistics do not match the scenario");
    const double budget = scenario.power_w;
    const Driving driving = driving_objective(algorithm, options.soft_c);
    Rng rng(options.seed);

    OptimizationResult result;
    result.algorithm = algorithm;
    BeamformerSet set = init_feasible(scenario, rng);
    result.reinitializations += reinitialize_degenerate(set, stats, budget, rng);

    auto objective_of = [&](const BeamformerSet &s) { return driving.value(slnrs(s, stats)); };
    int half_counter = 0;
    auto record = [&](int iteration, int half, double step, double weight_product, double gap, bool reinit) {
        TraceEntry e;
        e.iteration = iteration;
        e.half = half;
        const auto g = slnrs(set, stats);
        e.min_slnr = *std::min_element(g.begin(), g.end());
        e.objective = driving.value(g);
        e.power = total_power(set);
        e.step = step;
        e.weight_product = weight_product;
        e.subproblem_gap = gap;
        e.reinitialized = reinit;
        if (half_counter % options.rate_every == 0) {
            e.min_rate_nats = evaluate_min_rate(vectorize(set), stats, options);
            track_incumbent(result, set, e.min_rate_nats);
        }
        ++half_counter;
        result.traces.push_back(e);
    };
    record(0, 1, 0.0, 1.0, 0.0, result.reinitializations > 0);

    double previous = objective_of(set);
    try {
        for (int it = 1; it <= options.max_iterations; ++it) {
            std::vector<double> weights(static_cast<std::size_t>(set.L), 1.0);
            double weight_product = 1.0;
            if (algorithm == Algorithm::gm) {
                weights = gm_weights(slnrs(set, stats));
                weight_product = std::accumulate(weights.begin(), weights.end(), 1.0, std::multiplies<>());
            }
            for (const Side side : {Side::azimuth, Side::elevation}) {
                const int reinit = reinitialize_degenerate(set, stats, budget, rng);
                result.reinitializations += reinit;
                const SideModel model = build_side_model(side, set, stats, budget);
                HalfStep step;
                if (algorithm == Algorithm::maxmin) {
                    std::vector<SurrogateCoefficients> coeffs;
                    for (int l = 0; l < set.L; ++l)
                        coeffs.push_back(slnr_minorant_coeffs(model, l));
                    const auto problem = make_maxmin_problem(coeffs, model.coupling, budget);
                    const auto sol = solve_maxmin(problem, options.qcqp_tol, &model.current);
                    step.candidate = sol.v;
                    step.gap = sol.gap;
                } else if (algorithm == Algorithm::gm) {
                    std::vector<SurrogateCoefficients> coeffs;
                    for (int l = 0; l < set.L; ++l)
                        coeffs.push_back(log_slnr_minorant_coeffs(model, l));
                    step.candidate = closed_form_update(coeffs, weights, model.coupling, budget).v;
                } else {
                    const auto soft = soft_majorant_coeffs(model, options.soft_c);
                    const std::vector<double> ones(static_cast<std::size_t>(set.L), 1.0);
                    step.candidate = closed_form_update(soft.users, ones, model.coupling, budget).v;
                }

                // Keep the step only if the driving objective does not worsen;
                // otherwise backtrack along the segment to the old point, which
                // stays inside the (convex) power ball.
                const double current = objective_of(set);
                const std::vector<CVector> old = set.vectors(side);
                double accepted = 0.0;
                double t = 1.0;
                for (int k = 0; k <= 30; ++k, t *= 0.5) {
                    auto &target = set.vectors(side);
                    for (std::size_t l = 0; l < target.size(); ++l)
                        target[l] = (1.0 - t) * old[l] + t * step.candidate[l];
                    if (set.all_finite() && total_power(set) <= budget * (1.0 + 1e-10) &&
                        driving.improves(objective_of(set), current)) {
                        accepted = t;
                        break;
                    }
                }
                if (accepted == 0.0)
                    set.vectors(side) = old;
                record(it, side == Side::azimuth ? 0 : 1, accepted, weight_product, step.gap, reinit > 0);
            }
            result.iterations = it;
            const double now = objective_of(set);
            if (std::abs(now - previous) <= options.tolerance * std::max(std::abs(previous), 1e-300)) {
                result.converged = true;
                break;
            }
            previous = now;
        }
    } catch (const std::exception &e) {
        result.failure = e.what();
    }
    result.final_set = set;
    if (!result.has_incumbent())
        track_incumbent(result, set, stats, options);
    return result;
}

} // namespace detail

/// Alternating max-min of the SLNR through minorant subproblems.
inline OptimizationResult run_maxmin(const Scenario &scenario, const ChannelStatistics &stats,
                                     const AlgoOptions &options = {}) {
    return detail::run_alternating(Algorithm::maxmin, scenario, stats, options);
}

/// Alternating ascent of the geometric mean of ln(1 + SLNR).
inline OptimizationResult run_gm(const Scenario &scenario, const ChannelStatistics &stats,
                                 const AlgoOptions &options = {}) {
    return detail::run_alternating(Algorithm::gm, scenario, stats, options);
}

/// Alternating descent of ln sum_l (1 + SLNR_l/c)^-1.
inline OptimizationResult run_soft(const Scenario &scenario, const ChannelStatistics &stats,
                                   const AlgoOptions &options = {}) {
    return detail::run_alternating(Algorithm::soft, scenario, stats, options);
}

/// Uniform-power leakage-aware beamformers: vec(V_l) = sqrt(P/L) w_l with w_l
/// the top generalized eigenvector of (R_l, sum_{l'!=l} R_l' + (L sigma/P) I).
inline Precoder baseline_uniform(const ChannelStatistics &stats, const Scenario &scenario) {
    if (!(stats.sigma > 0.0))
        throw std::invalid_argument("baseline_uniform: sigma must be positive");
    const int L = stats.size();
    const Eigen::Index dim = stats[0].R.rows();
    const double loading = static_cast<double>(L) * stats.sigma / scenario.power_w;
    Precoder out;
    for (int l = 0; l < L; ++l) {
        CMatrix a = loading * CMatrix::Identity(dim, dim);
        for (int k = 0; k < L; ++k)
            if (k != l)
                a += stats[k].R;
        out.push_back(std::sqrt(scenario.power_w / L) * largest_generalized_eigvec(a, stats[l].R));
    }
    return out;
}

inline OptimizationResult run_baseline(const Scenario &scenario, const ChannelStatistics &stats,
                                       const AlgoOptions &options = {}) {
    OptimizationResult result;
    result.algorithm = Algorithm::baseline;
    result.incumbent_precoder = baseline_uniform(stats, scenario);
    const auto g = slnrs(result.incumbent_precoder, stats);
    TraceEntry e;
    e.min_slnr = *std::min_element(g.begin(), g.end());
    e.objective = e.min_slnr;
    e.power = total_power(result.incumbent_precoder);
    e.min_rate_nats = evaluate_min_rate(result.incumbent_precoder, stats, options);
    result.rate_min_nats = e.min_rate_nats;
    result.traces.push_back(e);
    result.converged = true;
    return result;
}

inline OptimizationResult run_algorithm(Algorithm algorithm, const Scenario &scenario, const ChannelStatistics &stats,
                                        const AlgoOptions &options = {}) {
    switch (algorithm) {
    case Algorithm::maxmin:
        return run_maxmin(scenario, stats, options);
    case Algorithm::gm:
        return run_gm(scenario, stats, options);
    case Algorithm::soft:
        return run_soft(scenario, stats, options);
    case Algorithm::baseline:
        return run_baseline(scenario, stats, options);
    }
    throw std::invalid_argument("run_algorithm: unknown algorithm");
}

} // namespace slnrbf

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
#include "slnrbf/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace slnrbf {

// ---------------------------------------------------------------------------
// Warnings

/// Sink for non-fatal diagnostics (the Monte Carlo fallback of the closed-form
/// rate). Defaults to stderr; tests and the CLI may silence it.
inline std::function<void(const std::string &)> &warning_sink() {
    static std::function<void(const std::string &)> sink = [](const std::string &msg) {
        std::cerr << "slnrbf warning: " << msg << '\n';
    };
    return sink;
}

inline std::atomic<long> &mc_fallback_count() {
    static std::atomic<long> count{0};
    return count;
}

// ---------------------------------------------------------------------------
// SLNR

namespace detail {
inline double slnr_with(const std::vector<CMatrix> &cov, const CVector &y, int l, double sigma) {
    double leak = 0.0;
    double sig = 0.0;
    for (std::size_t k = 0; k < cov.size(); ++k) {
        const double p = quad_form(cov[k], y);
        if (static_cast<int>(k) == l)
            sig = p;
        else
            leak += p;
    }
    return sig / (leak + sigma);
}

inline std::vector<CMatrix> collect(const ChannelStatistics &stats, bool tilde) {
    std::vector<CMatrix> out;
    out.reserve(stats.users.size());
    for (const auto &u : stats.users)
        out.push_back(tilde ? u.R_tilde : u.R);
    return out;
}
} // namespace detail

/// Covariance-form SLNR lower bound of user l, azimuth form:
/// ||sqrt(R~_l) Psi^e_l v^a_l||^2 / (sum_{l'!=l} ||sqrt(R~_l') Psi^e_l v^a_l||^2 + sigma).
inline double slnr(const BeamformerSet &set, const ChannelStatistics &stats, int l) {
    const CVector y = psi_matrix(Side::azimuth, set, l) * set.azimuth[static_cast<std::size_t>(l)];
    double leak = 0.0;
    double sig = 0.0;
    for (int k = 0; k < stats.size(); ++k) {
        const double p = quad_form(stats[k].R_tilde, y);
        (k == l ? sig : leak) += p;
    }
    return sig / (leak + stats.sigma);
}

/// Same quantity through the elevation form with Psi^a and R.
inline double slnr_elevation_form(const BeamformerSet &set, const ChannelStatistics &stats, int l) {
    const CVector y = psi_matrix(Side::elevation, set, l) * set.elevation[static_cast<std::size_t>(l)];
    double leak = 0.0;
    double sig = 0.0;
    for (int k = 0; k < stats.size(); ++k) {
        const double p = quad_form(stats[k].R, y);
        (k == l ? sig : leak) += p;
    }
    return sig / (leak + stats.sigma);
}

/// SLNR of a vectorized full beamformer: v^H R_l v / (sum_{l'!=l} v^H R_l' v + sigma).
inline double slnr(const Precoder &precoder, const ChannelStatistics &stats, int l) {
    const CVector &v = precoder[static_cast<std::size_t>(l)];
    double leak = 0.0;
    double sig = 0.0;
    for (int k = 0; k < stats.size(); ++k) {
        const double p = quad_form(stats[k].R, v);
        (k == l ? sig : leak) += p;
    }
    return sig / (leak + stats.sigma);
}

inline std::vector<double> slnrs(const Precoder &precoder, const ChannelStatistics &stats) {
    std::vector<double> out(static_cast<std::size_t>(stats.size()));
    for (int l = 0; l < stats.size(); ++l)
        out[static_cast<std::size_t>(l)] = slnr(precoder, stats, l);
    return out;
}

inline std::vector<double> slnrs(const BeamformerSet &set, const ChannelStatistics &stats) {
    std::vector<double> out(static_cast<std::size_t>(stats.size()));
    for (int l = 0; l < stats.size(); ++l)
        out[static_cast<std::size_t>(l)] = slnr(set, stats, l);
    return out;
}

// ---------------------------------------------------------------------------
// Instantaneous SINR

/// SINR of user l for one channel realization per user, literally
/// |sum_m (v^e_m)^T H_l v^a_m|^2 / (sum_{l'!=l} |sum_m (v^e_{m,l'})^T H_l v^a_{m,l'}|^2 + sigma).
inline double instantaneous_sinr(const BeamformerSet &set, std::span<const CMatrix> channels, int l, double sigma) {
    const CMatrix &h = channels[static_cast<std::size_t>(l)];
    double sig = 0.0;
    double interference = 0.0;
    for (int k = 0; k < set.L; ++k) {
        cplx form = 0.0;
        for (int m = 0; m < set.M; ++m) {
            const auto ve = set.elevation[static_cast<std::size_t>(k)].segment(m * set.Q, set.Q);
            const auto va = set.azimuth[static_cast<std::size_t>(k)].segment(m * set.Q, set.Q);
            form += (ve.transpose() * h * va)(0, 0);
        }
        (k == l ? sig : interference) += std::norm(form);
    }
    return sig / (interference + sigma);
}

/// SINR through <H_l^T V_l'> = vec(H_l)^T vec(V_l').
inline double instantaneous_sinr(const Precoder &precoder, std::span<const CMatrix> channels, int l, double sigma) {
    const CVector h = vec(channels[static_cast<std::size_t>(l)]);
    double sig = 0.0;
    double interference = 0.0;
    for (std::size_t k = 0; k < precoder.size(); ++k) {
        const double p = std::norm((h.transpose() * precoder[k])(0, 0));
        (static_cast<int>(k) == l ? sig : interference) += p;
    }
    return sig / (interference + sigma);
}

// ---------------------------------------------------------------------------
// Ergodic rate

struct McEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

inline constexpr double kEigenGapTol = 1e-6;
inline constexpr std::size_t kFallbackSamples = 100000;
inline constexpr std::uint64_t kFallbackSeed = 0x5eed5eedULL;

/// E[ln(1 + X/sigma)] for X = sum_i mu_i |z_i|^2 with z iid CN(0,1), via
///   sum_m e^{sigma/mu_m} E1(sigma/mu_m) / prod_{l != m} (1 - mu_l/mu_m).
/// Eigenvalues at or below 1e-10 sigma are dropped (their terms are below
/// 1e-10 nats). Returns nullopt when two retained eigenvalues coalesce within
/// kEigenGapTol relative.
inline std::optional<double> log_mixture_expectation(std::span<const double> eigenvalues, double sigma) {
    std::vector<double> mu;
    for (double e : eigenvalues)
        if (e > 1e-10 * sigma)
            mu.push_back(e);
    std::sort(mu.begin(), mu.end(), std::greater<>());
    for (std::size_t i = 1; i < mu.size(); ++i)
        if (mu[i - 1] - mu[i] <= kEigenGapTol * mu[i - 1])
            return std::nullopt;
    double total = 0.0;
    for (std::size_t m = 0; m < mu.size(); ++m) {
        double denom = 1.0;
        for (std::size_t k = 0; k < mu.size(); ++k)
            if (k != m)
                denom *= 1.0 - mu[k] / mu[m];
        total += scaled_exp_integral_e1(sigma / mu[m]) / denom;
    }
    return total;
}

namespace detail {
/// Rows of the map z -> (h^T v_k)_k where h = vec(H_l) and H_l is generated
/// from white z = vec(H_s): h = sqrt(g) (sqrt(R_h)^T kron sqrt(R_v)) z.
inline CMatrix user_gain_map(const Precoder &precoder, const UserStatistics &user) {
    const CMatrix t = std::sqrt(user.geometry.path_gain) * kron(user.sqrt_R_h.transpose(), user.sqrt_R_v);
    CMatrix v(t.rows(), static_cast<Eigen::Index>(precoder.size()));
    for (std::size_t k = 0; k < precoder.size(); ++k)
        v.col(static_cast<Eigen::Index>(k)) = precoder[k];
    return v.transpose() * t;
}

inline void fill_gaussian(CVector &z, Rng &rng, std::normal_distribution<double> &normal) {
    constexpr double scale = 0.70710678118654752440;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        z(i) = cplx(scale * re, scale * im);
    }
}
} // namespace detail

/// Monte Carlo estimate of E[ln(1 + SINR_l)] over iid channel draws of user l.
inline McEstimate ergodic_rate_mc(const Precoder &precoder, const ChannelStatistics &stats, int l,
                                  std::size_t n_samples, Rng &rng) {
    if (n_samples < 2)
        throw std::invalid_argument("ergodic_rate_mc: need at least two samples");
    const CMatrix gains = detail::user_gain_map(precoder, stats[l]);
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector z(gains.cols());
    CVector g(gains.rows());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        detail::fill_gaussian(z, rng, normal);
        g.noalias() = gains * z;
        double interference = 0.0;
        for (Eigen::Index k = 0; k < g.size(); ++k)
            if (k != l)
                interference += std::norm(g(k));
        const double r = std::log1p(std::norm(g(l)) / (interference + stats.sigma));
        sum += r;
        sum_sq += r * r;
    }
    const double n = static_cast<double>(n_samples);
    const double mean = sum / n;
    const double var = std::max(sum_sq / n - mean * mean, 0.0) * n / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

/// Closed-form ergodic rate of user l in nats from the eigenvalues of
/// S_l = W^H R_l W and of S_l with row and column l removed. Falls back to a
/// fixed-seed Monte Carlo estimate when eigenvalues coalesce.
inline double ergodic_rate_closed(const Precoder &precoder, const ChannelStatistics &stats, int l) {
    const auto L = static_cast<Eigen::Index>(precoder.size());
    CMatrix w(precoder.front().size(), L);
    for (Eigen::Index k = 0; k < L; ++k)
        w.col(k) = precoder[static_cast<std::size_t>(k)];
    CMatrix s = w.adjoint() * stats[l].R * w;
    s = 0.5 * (s + s.adjoint());
    CMatrix s_reduced(L - 1, L - 1);
    for (Eigen::Index i = 0, ri = 0; i < L; ++i) {
        if (i == l)
            continue;
        for (Eigen::Index j = 0, rj = 0; j < L; ++j) {
            if (j == l)
                continue;
            s_reduced(ri, rj++) = s(i, j);
        }
        ++ri;
    }
    const RVector mu = hermitian_eig(s).values;
    const RVector lambda = L > 1 ? hermitian_eig(s_reduced).values : RVector();
    const auto full = log_mixture_expectation(std::span<const double>(mu.data(), static_cast<std::size_t>(mu.size())),
                                              stats.sigma);
    const auto rest = log_mixture_expectation(
        std::span<const double>(lambda.data(), static_cast<std::size_t>(lambda.size())), stats.sigma);
    if (full && rest)
        return std::max(*full - *rest, 0.0);

    ++mc_fallback_count();
    warning_sink()("ergodic_rate_closed: coalescing eigenvalues for user " + std::to_string(l) +
                   ", falling back to Monte Carlo");
    Rng rng(kFallbackSeed);
    return ergodic_rate_mc(precoder, stats, l, kFallbackSamples, rng).mean;
}

inline double ergodic_rate_closed(const BeamformerSet &set, const ChannelStatistics &stats, int l) {
    return ergodic_rate_closed(vectorize(set), stats, l);
}

/// Monte Carlo E[SLNR_l] where signal and leakage come from independent user
/// channels; by Mullen's inequality it dominates the covariance-form slnr().
inline McEstimate expected_slnr_mc(const Precoder &precoder, const ChannelStatistics &stats, int l,
                                   std::size_t n_samples, Rng &rng) {
    std::vector<CMatrix> rows;
    rows.reserve(static_cast<std::size_t>(stats.size()));
    for (int k = 0; k < stats.size(); ++k)
        rows.push_back(detail::user_gain_map(precoder, stats[k]).row(l)); // h_k^T v_l
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector z(rows.front().cols());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        double sig = 0.0;
        double leak = 0.0;
        for (int k = 0; k < stats.size(); ++k) {
            detail::fill_gaussian(z, rng, normal);
            const double p = std::norm((rows[static_cast<std::size_t>(k)] * z)(0, 0));
            (k == l ? sig : leak) += p;
        }
        const double r = sig / (leak + stats.sigma);
        sum += r;
        sum_sq += r * r;
    }
    const double n = static_cast<double>(n_samples);
    const double mean = sum / n;
    const double var = std::max(sum_sq / n - mean * mean, 0.0) * n / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

// ---------------------------------------------------------------------------
// Fairness

inline double jain_index(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("jain_index: empty input");
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : values) {
        if (v < 0.0)
            throw std::invalid_argument("jain_index: values must be nonnegative");
        sum += v;
        sum_sq += v * v;
    }
    if (sum_sq == 0.0)
        throw std::invalid_argument("jain_index: all values are zero");
    return sum * sum / (static_cast<double>(values.size()) * sum_sq);
}

inline double min_max_ratio(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("min_max_ratio: empty input");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (!(*hi > 0.0))
        throw std::invalid_argument("min_max_ratio: maximum must be positive");
    return *lo / *hi;
}

inline double nats_to_mbps(double rate_nats, double bandwidth_hz) {
    return rate_nats / std::numbers::ln2 * bandwidth_hz / 1e6;
}

// ---------------------------------------------------------------------------
// Reports

enum class RateMethod { closed, monte_carlo };

struct RateReport {
    std::vector<double> slnr;
    std::vector<double> rate_nats;
    std::vector<double> rate_mbps;
    double min_slnr = 0.0;
    double min_rate_mbps = 0.0;
    double max_rate_mbps = 0.0;
    double min_max_ratio = 0.0;
    double jain = 0.0;
};

inline std::vector<double> ergodic_rates(const Precoder &precoder, const ChannelStatistics &stats, RateMethod method,
                                         std::size_t mc_samples = kFallbackSamples,
                                         std::uint64_t mc_seed = kFallbackSeed) {
    std::vector<double> out(static_cast<std::size_t>(stats.size()));
    for (int l = 0; l < stats.size(); ++l) {
        if (method == RateMethod::closed) {
            out[static_cast<std::size_t>(l)] = ergodic_rate_closed(precoder, stats, l);
        } else {
            Rng rng(mc_seed + static_cast<std::uint64_t>(l));
            out[static_cast<std::size_t>(l)] = ergodic_rate_mc(precoder, stats, l, mc_samples, rng).mean;
        }
    }
    return out;
}

inline double min_ergodic_rate(const Precoder &precoder, const ChannelStatistics &stats, RateMethod method,
                               std::size_t mc_samples = kFallbackSamples) {
    const auto rates = ergodic_rates(precoder, stats, method, mc_samples);
    return *std::min_element(rates.begin(), rates.end());
}

inline RateReport rate_report(const Precoder &precoder, const ChannelStatistics &stats, double bandwidth_hz,
                              RateMethod method = RateMethod::closed, std::size_t mc_samples = kFallbackSamples) {
    RateReport r;
    r.slnr = slnrs(precoder, stats);
    r.rate_nats = ergodic_rates(precoder, stats, method, mc_samples);
    r.rate_mbps.reserve(r.rate_nats.size());
    for (double x : r.rate_nats)
        r.rate_mbps.push_back(nats_to_mbps(x, bandwidth_hz));
    r.min_slnr = *std::min_element(r.slnr.begin(), r.slnr.end());
    const auto [lo, hi] = std::minmax_element(r.rate_mbps.begin(), r.rate_mbps.end());
    r.min_rate_mbps = *lo;
    r.max_rate_mbps = *hi;
    r.min_max_ratio = *hi > 0.0 ? *lo / *hi : 0.0;
    r.jain = *hi > 0.0 ? jain_index(r.rate_mbps) : 0.0;
    return r;
}

} // namespace slnrbf

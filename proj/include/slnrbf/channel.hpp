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

#include "slnrbf/numerics.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace slnrbf {

using Rng = std::mt19937_64;

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }
inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Background noise power in watts for a density in dBm/Hz over a bandwidth.
inline double noise_power_w(double density_dbm_hz, double bandwidth_hz) {
    return dbm_to_watt(density_dbm_hz) * bandwidth_hz;
}

/// Physical and algorithmic parameters of one experiment drop.
struct Scenario {
    int Q = 4;  // antennas per side of the Q x Q URA
    int L = 3;  // users
    int M = 1;  // outer products per beamformer
    double power_w = dbm_to_watt(24.0);
    double sigma_w = noise_power_w(-174.0, 10e6);
    double bandwidth_hz = 10e6;
    double carrier_hz = 2e9;
    double cell_radius_m = 200.0;
    double min_radius_m = 10.0;
    double bs_height_m = 10.0;
    double ue_height_m = 1.5;
    double sigma_sf_db = 7.8;
    double sigma_alpha_rad = deg_to_rad(5.0);
    double sigma_beta_rad = deg_to_rad(5.0);
    std::uint64_t seed = 1;

    void validate() const {
        if (Q < 1)
            throw std::invalid_argument("scenario: Q must be >= 1");
        if (L < 1)
            throw std::invalid_argument("scenario: L must be >= 1");
        if (M < 1 || M > Q)
            throw std::invalid_argument("scenario: M must lie in [1, Q]");
        if (!(power_w > 0.0))
            throw std::invalid_argument("scenario: power budget must be positive");
        if (!(sigma_w > 0.0))
            throw std::invalid_argument("scenario: noise power must be positive");
        if (!(bandwidth_hz > 0.0))
            throw std::invalid_argument("scenario: bandwidth must be positive");
        if (!(cell_radius_m > 0.0) || !(min_radius_m >= 0.0) || min_radius_m >= cell_radius_m)
            throw std::invalid_argument("scenario: need 0 <= min_radius < cell_radius");
        if (!(sigma_alpha_rad >= 0.0) || !(sigma_beta_rad >= 0.0) || !(sigma_sf_db >= 0.0))
            throw std::invalid_argument("scenario: spreads must be nonnegative");
    }
};

struct UserGeometry {
    double distance_m = 0.0;    // horizontal distance to the BS
    double azimuth_rad = 0.0;   // alpha
    double elevation_rad = 0.0; // beta, measured from the array's vertical axis
    double shadow_db = 0.0;     // xi
    double path_gain = 0.0;     // linear large-scale gain
};

/// 28.8 + 35.3 log10(d) + shadow, in dB.
inline double pathloss_db(double distance_m, double shadow_db) {
    if (!(distance_m > 0.0))
        throw std::domain_error("pathloss_db: distance must be positive");
    return 28.8 + 35.3 * std::log10(distance_m) + shadow_db;
}

inline double path_gain_from_db(double loss_db) { return std::pow(10.0, -loss_db / 10.0); }

/// Drops scenario.L users uniformly over the annulus [min_radius, cell_radius]
/// around the BS and draws one shadow-fading value per user.
inline std::vector<UserGeometry> place_users(const Scenario &scenario, Rng &rng) {
    scenario.validate();
    std::uniform_real_distribution<double> area(scenario.min_radius_m * scenario.min_radius_m,
                                                scenario.cell_radius_m * scenario.cell_radius_m);
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    std::normal_distribution<double> shadow(0.0, scenario.sigma_sf_db);
    const double height_gap = scenario.bs_height_m - scenario.ue_height_m;

    std::vector<UserGeometry> users(static_cast<std::size_t>(scenario.L));
    for (auto &u : users) {
        u.distance_m = std::min(std::sqrt(area(rng)), scenario.cell_radius_m);
        u.azimuth_rad = phase(rng);
        u.elevation_rad = std::numbers::pi / 2.0 + std::atan2(height_gap, u.distance_m);
        u.shadow_db = shadow(rng);
        u.path_gain = path_gain_from_db(pathloss_db(u.distance_m, u.shadow_db));
    }
    return users;
}

/// [R_v]_{m,p} = exp(j pi (p-m) cos b) exp(-1/2 [s_b pi (p-m) sin b]^2)
inline CMatrix vertical_correlation(double beta, double sigma_beta, int Q) {
    if (Q < 1)
        throw std::invalid_argument("vertical_correlation: Q must be >= 1");
    const double pi = std::numbers::pi;
    CMatrix r(Q, Q);
    for (int m = 0; m < Q; ++m) {
        for (int p = 0; p < Q; ++p) {
            const double k = p - m;
            const double spread = sigma_beta * pi * k * std::sin(beta);
            r(m, p) = std::polar(std::exp(-0.5 * spread * spread), pi * k * std::cos(beta));
        }
    }
    return r;
}

/// Horizontal correlation with the three auxiliary terms
///   g1 = pi (q-n) sin b, g2 = s_b pi (q-n) cos b, g3 = g2^2 s_a^2 sin^2 a + 1.
inline CMatrix horizontal_correlation(double alpha, double beta, double sigma_alpha, double sigma_beta, int Q) {
    if (Q < 1)
        throw std::invalid_argument("horizontal_correlation: Q must be >= 1");
    const double pi = std::numbers::pi;
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    CMatrix r(Q, Q);
    for (int n = 0; n < Q; ++n) {
        for (int q = 0; q < Q; ++q) {
            const double k = q - n;
            const double g1 = pi * k * std::sin(beta);
            const double g2 = sigma_beta * pi * k * std::cos(beta);
            const double g3 = g2 * g2 * sigma_alpha * sigma_alpha * sa * sa + 1.0;
            const double g1s = g1 * sigma_alpha * sa;
            const double magnitude =
                std::exp(-g2 * g2 * ca * ca / (2.0 * g3)) * std::exp(-g1s * g1s / (2.0 * g3)) / std::sqrt(g3);
            r(n, q) = std::polar(magnitude, g1 * ca / g3);
        }
    }
    return r;
}

/// Second-order statistics of one user's channel.
struct UserStatistics {
    UserGeometry geometry;
    CMatrix R_v;     // Q x Q vertical correlation
    CMatrix R_h;     // Q x Q horizontal correlation
    CMatrix R;       // E[conj(h) h^T]  = g R_h kron R_v^T, h = vec(H)
    CMatrix R_tilde; // E[conj(h~) h~^T] = g R_v^T kron R_h, h~ = vec(H^T)
    CMatrix sqrt_R_v;
    CMatrix sqrt_R_h;
    CMatrix sqrt_R;
    CMatrix sqrt_R_tilde;
};

struct ChannelStatistics {
    int Q = 0;
    double sigma = 0.0; // noise power, watts
    std::vector<UserStatistics> users;

    int size() const { return static_cast<int>(users.size()); }
    const UserStatistics &operator[](int l) const { return users[static_cast<std::size_t>(l)]; }
};

/// (R, R_tilde) of one user: g R_h kron R_v^T and g R_v^T kron R_h.
inline std::pair<CMatrix, CMatrix> covariance_pair(const UserGeometry &geometry, const Scenario &scenario) {
    const CMatrix r_v = vertical_correlation(geometry.elevation_rad, scenario.sigma_beta_rad, scenario.Q);
    const CMatrix r_h = horizontal_correlation(geometry.azimuth_rad, geometry.elevation_rad, scenario.sigma_alpha_rad,
                                               scenario.sigma_beta_rad, scenario.Q);
    return {geometry.path_gain * kron(r_h, r_v.transpose()), geometry.path_gain * kron(r_v.transpose(), r_h)};
}

inline UserStatistics user_statistics(const UserGeometry &geometry, const Scenario &scenario) {
    UserStatistics s;
    s.geometry = geometry;
    s.R_v = vertical_correlation(geometry.elevation_rad, scenario.sigma_beta_rad, scenario.Q);
    s.R_h = horizontal_correlation(geometry.azimuth_rad, geometry.elevation_rad, scenario.sigma_alpha_rad,
                                   scenario.sigma_beta_rad, scenario.Q);
    s.R = geometry.path_gain * kron(s.R_h, s.R_v.transpose());
    s.R_tilde = geometry.path_gain * kron(s.R_v.transpose(), s.R_h);
    s.sqrt_R_v = hermitian_sqrt(s.R_v);
    s.sqrt_R_h = hermitian_sqrt(s.R_h);
    // sqrt(A kron B) = sqrt(A) kron sqrt(B) for PSD factors, and sqrt(X^T) = sqrt(X)^T.
    const double root_gain = std::sqrt(geometry.path_gain);
    s.sqrt_R = root_gain * kron(s.sqrt_R_h, s.sqrt_R_v.transpose());
    s.sqrt_R_tilde = root_gain * kron(s.sqrt_R_v.transpose(), s.sqrt_R_h);
    return s;
}

inline ChannelStatistics build_statistics(const Scenario &scenario, const std::vector<UserGeometry> &geometries) {
    scenario.validate();
    ChannelStatistics stats;
    stats.Q = scenario.Q;
    stats.sigma = scenario.sigma_w;
    stats.users.reserve(geometries.size());
    for (const auto &g : geometries)
        stats.users.push_back(user_statistics(g, scenario));
    return stats;
}

/// Places users from scenario.seed and builds their statistics.
inline ChannelStatistics generate_statistics(const Scenario &scenario) {
    Rng rng(scenario.seed);
    return build_statistics(scenario, place_users(scenario, rng));
}

/// Standard circular complex Gaussian entries, unit variance.
inline CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(2.0);
    CMatrix out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            out(i, j) = cplx(scale * re, scale * im);
        }
    return out;
}

/// One small-scale fading draw H = sqrt(g) sqrt(R_v) H_s sqrt(R_h).
inline CMatrix sample_channel(const UserStatistics &user, Rng &rng) {
    const Eigen::Index q = user.R_v.rows();
    const CMatrix h_s = complex_gaussian(q, q, rng);
    return std::sqrt(user.geometry.path_gain) * user.sqrt_R_v * h_s * user.sqrt_R_h;
}

/// Column-major vec().
inline CVector vec(const CMatrix &m) {
    return Eigen::Map<const CVector>(m.data(), m.size());
}

} // namespace slnrbf

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

#include "slnrbf/channel.hpp"
#include "slnrbf/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace slnrbf {

/// The half of the outer-product beamformer being optimized. With
/// Side::azimuth the elevation vectors are held fixed, and vice versa.
enum class Side { azimuth, elevation };

inline constexpr Side other(Side s) { return s == Side::azimuth ? Side::elevation : Side::azimuth; }
inline constexpr std::string_view to_string(Side s) { return s == Side::azimuth ? "azimuth" : "elevation"; }

/// Per-user stacked azimuth and elevation vectors, each of length Q*M:
/// v = [v_1; ...; v_M] with v_m in C^Q. The full beamformer of user l is
/// V_l = sum_m v^e_m (v^a_m)^T.
struct BeamformerSet {
    int Q = 0;
    int M = 0;
    int L = 0;
    std::vector<CVector> azimuth;
    std::vector<CVector> elevation;

    BeamformerSet() = default;
    BeamformerSet(int q, int m, int l)
        : Q(q), M(m), L(l), azimuth(static_cast<std::size_t>(l), CVector::Zero(q * m)),
          elevation(static_cast<std::size_t>(l), CVector::Zero(q * m)) {}

    std::vector<CVector> &vectors(Side s) { return s == Side::azimuth ? azimuth : elevation; }
    const std::vector<CVector> &vectors(Side s) const { return s == Side::azimuth ? azimuth : elevation; }

    /// Q x M matrix [v_1 ... v_M] of one side of user l.
    CMatrix columns(Side s, int l) const {
        const CVector &v = vectors(s)[static_cast<std::size_t>(l)];
        return Eigen::Map<const CMatrix>(v.data(), Q, M);
    }

    bool all_finite() const {
        for (int l = 0; l < L; ++l)
            if (!azimuth[static_cast<std::size_t>(l)].allFinite() ||
                !elevation[static_cast<std::size_t>(l)].allFinite())
                return false;
        return true;
    }
};

/// Vectorized full beamformers vec(V_l), one Q^2 vector per user. This is the
/// common currency of the rate metrics and of the uniform-power baseline.
using Precoder = std::vector<CVector>;

inline CMatrix full_beamformer(const BeamformerSet &set, int l) {
    return set.columns(Side::elevation, l) * set.columns(Side::azimuth, l).transpose();
}

inline Precoder vectorize(const BeamformerSet &set) {
    Precoder out;
    out.reserve(static_cast<std::size_t>(set.L));
    for (int l = 0; l < set.L; ++l)
        out.push_back(vec(full_beamformer(set, l)));
    return out;
}

/// sum_l || sum_m v^a_m (v^e_m)^T ||_F^2
inline double total_power(const BeamformerSet &set) {
    double p = 0.0;
    for (int l = 0; l < set.L; ++l)
        p += full_beamformer(set, l).squaredNorm();
    return p;
}

inline double total_power(const Precoder &precoder) {
    double p = 0.0;
    for (const auto &v : precoder)
        p += v.squaredNorm();
    return p;
}

/// Power matrix A of user l for the optimized side: the Gram matrix of the
/// fixed-side vectors expanded as (E^H E) kron I_Q, so that
/// v^H A v = ||V_l||_F^2 with the other side held at its current value.
inline CMatrix coupling_matrix(Side side, const BeamformerSet &set, int l) {
    const CMatrix fixed = set.columns(other(side), l);
    return kron(fixed.adjoint() * fixed, CMatrix::Identity(set.Q, set.Q));
}

/// Psi = [u_1 ... u_M] kron I_Q built from the fixed-side vectors u_m.
/// For Side::azimuth, vec(H^T)^T Psi v^a equals sum_m (v^e_m)^T H v^a_m; for
/// Side::elevation, vec(H)^T Psi v^e gives the same bilinear form.
inline CMatrix psi_matrix(Side side, const BeamformerSet &set, int l) {
    return kron(set.columns(other(side), l), CMatrix::Identity(set.Q, set.Q));
}

/// Covariance paired with Psi on a side: R_tilde for azimuth, R for elevation.
inline const CMatrix &side_covariance(Side side, const UserStatistics &user) {
    return side == Side::azimuth ? user.R_tilde : user.R;
}

inline const CMatrix &side_sqrt_covariance(Side side, const UserStatistics &user) {
    return side == Side::azimuth ? user.sqrt_R_tilde : user.sqrt_R;
}

/// Draws every entry standard circular Gaussian, then scales the azimuth block
/// so that total_power equals the budget.
inline BeamformerSet init_feasible(const Scenario &scenario, Rng &rng) {
    scenario.validate();
    BeamformerSet set(scenario.Q, scenario.M, scenario.L);
    for (int l = 0; l < scenario.L; ++l) {
        set.azimuth[static_cast<std::size_t>(l)] = complex_gaussian(scenario.Q * scenario.M, 1, rng);
        set.elevation[static_cast<std::size_t>(l)] = complex_gaussian(scenario.Q * scenario.M, 1, rng);
    }
    const double p = total_power(set);
    const double scale = std::sqrt(scenario.power_w / p);
    for (auto &v : set.azimuth)
        v *= scale;
    return set;
}

/// Quadratic forms of every user's SLNR when one side is optimized and the
/// other is frozen at its current value:
///   signal_l  = Psi_l^H Cov_l Psi_l
///   leakage_l = sum_{l' != l} Psi_l^H Cov_l' Psi_l
/// so that gamma_l(v) = v^H signal_l v / (v^H leakage_l v + sigma).
struct SideModel {
    Side side = Side::azimuth;
    double sigma = 0.0;
    double power_budget = 0.0;
    std::vector<CMatrix> signal;
    std::vector<CMatrix> leakage;
    std::vector<CMatrix> coupling;
    std::vector<CMatrix> chi_map; // sqrt(Cov_l) Psi_l
    std::vector<CVector> current; // the optimized side's vectors at build time

    int size() const { return static_cast<int>(signal.size()); }

    double signal_power(int l, const CVector &v) const { return quad_form(signal[static_cast<std::size_t>(l)], v); }
    double leakage_power(int l, const CVector &v) const { return quad_form(leakage[static_cast<std::size_t>(l)], v); }
    double slnr(int l, const CVector &v) const { return signal_power(l, v) / (leakage_power(l, v) + sigma); }

    std::vector<double> slnrs(const std::vector<CVector> &v) const {
        std::vector<double> out(v.size());
        for (std::size_t l = 0; l < v.size(); ++l)
            out[l] = slnr(static_cast<int>(l), v[l]);
        return out;
    }

    double power(const std::vector<CVector> &v) const {
        double p = 0.0;
        for (std::size_t l = 0; l < v.size(); ++l)
            p += quad_form(coupling[l], v[l]);
        return p;
    }
};

inline SideModel build_side_model(Side side, const BeamformerSet &set, const ChannelStatistics &stats,
                                  double power_budget) {
    if (stats.size() != set.L || stats.Q != set.Q)
        throw std::invalid_argument("build_side_model: statistics do not match the beamformer set");
    SideModel model;
    model.side = side;
    model.sigma = stats.sigma;
    model.power_budget = power_budget;
    model.current = set.vectors(side);
    const auto n = static_cast<std::size_t>(set.L);
    model.signal.resize(n);
    model.leakage.resize(n);
    model.coupling.resize(n);
    model.chi_map.resize(n);
    for (int l = 0; l < set.L; ++l) {
        const auto li = static_cast<std::size_t>(l);
        const CMatrix psi = psi_matrix(side, set, l);
        const Eigen::Index dim = psi.cols();
        CMatrix leak = CMatrix::Zero(dim, dim);
        for (int k = 0; k < set.L; ++k) {
            CMatrix g = psi.adjoint() * side_covariance(side, stats[k]) * psi;
            g = 0.5 * (g + g.adjoint());
            if (k == l)
                model.signal[li] = std::move(g);
            else
                leak += g;
        }
        model.leakage[li] = std::move(leak);
        model.coupling[li] = coupling_matrix(side, set, l);
        model.chi_map[li] = side_sqrt_covariance(side, stats[l]) * psi;
    }
    return model;
}

} // namespace slnrbf

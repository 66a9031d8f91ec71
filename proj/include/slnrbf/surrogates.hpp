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
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace slnrbf {

/// Raised when a user's current signal term is exactly zero, so no
/// informative surrogate exists at the iterate.
class DegenerateUser : public std::runtime_error {
  public:
    explicit DegenerateUser(int user)
        : std::runtime_error("degenerate user " + std::to_string(user) + ": zero signal power at the iterate"),
          user_index(user) {}
    int user_index;
};

enum class Sense { minorant, majorant };

/// Quadratic surrogate in one user's vector v:
///   minorant: a + 2 Re{b v} - v^H C v
///   majorant: a - 2 Re{b v} + v^H C v
struct SurrogateCoefficients {
    double a = 0.0;
    CRowVector b;
    CMatrix C;
    Sense sense = Sense::minorant;

    double value(const CVector &v) const {
        const double linear = 2.0 * (b * v)(0, 0).real();
        const double quad = quad_form(C, v);
        return sense == Sense::minorant ? a + linear - quad : a - linear + quad;
    }

    /// Ascent direction for minorants, descent direction for majorants: 2(b^H - C v)
    CVector gradient(const CVector &v) const {
        const CVector g = 2.0 * (b.adjoint() - C * v);
        return sense == Sense::minorant ? g : CVector(-g);
    }
};

// ---------------------------------------------------------------------------
// Scalar inequalities in (chi, x)

struct LogMinorant {
    double alpha = 0.0;
    double psi = 0.0;
};

/// ln(1 + ||chi||^2/x) >= alpha + 2 Re{chi_bar^H chi}/x_bar - psi (||chi||^2 + x)
inline LogMinorant log_quadratic_minorant(const CVector &chi_bar, double x_bar) {
    if (!(x_bar > 0.0))
        throw std::domain_error("log_quadratic_minorant: x_bar must be positive");
    const double s = chi_bar.squaredNorm();
    return {std::log1p(s / x_bar) - s / x_bar, s / (x_bar * (s + x_bar))};
}

/// Evaluated around the expansion point, d = chi - chi_bar:
///   ln(1 + s/x_bar) + 2 Re{chi_bar^H d}/(s + x_bar) - psi (||d||^2 + x - x_bar)
/// which is the same function without the O(s/x_bar) cancellation.
inline double log_minorant_value(const LogMinorant &m, const CVector &chi_bar, double x_bar, const CVector &chi,
                                 double x) {
    const double s = chi_bar.squaredNorm();
    const CVector d = chi - chi_bar;
    return std::log1p(s / x_bar) + 2.0 * chi_bar.dot(d).real() / (s + x_bar) - m.psi * (d.squaredNorm() + (x - x_bar));
}

/// ||chi||^2/x >= a + 2 Re{b chi} - c (||chi||^2 + x), with
/// a = -||chi_bar||^4/x_bar^2, b = (x_bar + ||chi_bar||^2)/x_bar^2 chi_bar^H,
/// c = ||chi_bar||^2/x_bar^2.
struct RatioMinorant {
    double a = 0.0;
    CRowVector b;
    double c = 0.0;
    CVector chi_bar;
    double x_bar = 1.0;

    /// Centred form s/x_bar + 2 Re{chi_bar^H d}/x_bar - c (||d||^2 + x - x_bar), d = chi - chi_bar.
    double value(const CVector &chi, double x) const {
        const CVector d = chi - chi_bar;
        return chi_bar.squaredNorm() / x_bar + 2.0 * chi_bar.dot(d).real() / x_bar - c * (d.squaredNorm() + (x - x_bar));
    }
};

inline RatioMinorant ratio_quadratic_minorant(const CVector &chi_bar, double x_bar) {
    if (!(x_bar > 0.0))
        throw std::domain_error("ratio_quadratic_minorant: x_bar must be positive");
    const double s = chi_bar.squaredNorm();
    const double x2 = x_bar * x_bar;
    return {-s * s / x2, ((x_bar + s) / x2) * chi_bar.adjoint(), s / x2, chi_bar, x_bar};
}

/// Majorant of ln(sum_l (1 - ||chi_l||^2/(||chi_l||^2 + c x_l))):
///   constant - sum_l [2 Re{b_l chi_l} - w_l (||chi_l||^2 + c x_l)]
/// with pi_l = ||chi_bar_l||^2 + c x_bar_l, chi1 = sum_l c x_bar_l/pi_l,
/// b_l = chi_bar_l^H/(chi1 pi_l), w_l = ||chi_bar_l||^2/(chi1 pi_l^2) and
/// constant = ln chi1 + (1/chi1) sum_l ||chi_bar_l||^2/pi_l.
struct SoftMajorant {
    double c = 0.0;
    double constant = 0.0;
    double chi1 = 0.0;
    std::vector<CRowVector> b;
    std::vector<double> w;
    std::vector<CVector> chi_bar;
    std::vector<double> x_bar;

    /// Centred form, d_l = chi_l - chi_bar_l:
    ///   ln chi1 - sum_l [2 Re{chi_bar_l^H d_l} c x_bar_l/(chi1 pi_l^2) - w_l (||d_l||^2 + c (x_l - x_bar_l))]
    double value(std::span<const CVector> chi, std::span<const double> x) const {
        double acc = std::log(chi1);
        for (std::size_t l = 0; l < b.size(); ++l) {
            const CVector d = chi[l] - chi_bar[l];
            const double pi = chi_bar[l].squaredNorm() + c * x_bar[l];
            const double linear = 2.0 * chi_bar[l].dot(d).real() * c * x_bar[l] / (chi1 * pi * pi);
            acc -= linear - w[l] * (d.squaredNorm() + c * (x[l] - x_bar[l]));
        }
        return acc;
    }
};

inline double softmin_value(std::span<const CVector> chi, std::span<const double> x, double c) {
    double acc = 0.0;
    for (std::size_t l = 0; l < chi.size(); ++l) {
        const double s = chi[l].squaredNorm();
        acc += c * x[l] / (s + c * x[l]); // 1 - s/(s + c x) without the cancellation
    }
    return std::log(acc);
}

inline SoftMajorant softmin_majorant(std::span<const CVector> chi_bars, std::span<const double> x_bars, double c) {
    if (!(c > 0.0))
        throw std::domain_error("softmin_majorant: c must be positive");
    if (chi_bars.size() != x_bars.size() || chi_bars.empty())
        throw std::invalid_argument("softmin_majorant: size mismatch");
    SoftMajorant m;
    m.c = c;
    std::vector<double> pi(chi_bars.size());
    std::vector<double> s(chi_bars.size());
    for (std::size_t l = 0; l < chi_bars.size(); ++l) {
        if (!(x_bars[l] > 0.0))
            throw std::domain_error("softmin_majorant: x_bar must be positive");
        s[l] = chi_bars[l].squaredNorm();
        pi[l] = s[l] + c * x_bars[l];
        m.chi1 += c * x_bars[l] / pi[l];
    }
    double correction = 0.0;
    for (std::size_t l = 0; l < chi_bars.size(); ++l) {
        m.b.push_back(chi_bars[l].adjoint() / (m.chi1 * pi[l]));
        m.w.push_back(s[l] / (m.chi1 * pi[l] * pi[l]));
        correction += s[l] / pi[l];
    }
    m.constant = std::log(m.chi1) + correction / m.chi1;
    m.chi_bar.assign(chi_bars.begin(), chi_bars.end());
    m.x_bar.assign(x_bars.begin(), x_bars.end());
    return m;
}

// ---------------------------------------------------------------------------
// Objectives driven by the three algorithms

/// [prod_l ln(1 + gamma_l)]^(1/L), computed through the mean log.
inline double gm_objective(std::span<const double> slnr) {
    double acc = 0.0;
    for (double g : slnr) {
        const double r = std::log1p(g);
        if (!(r > 0.0))
            return 0.0;
        acc += std::log(r);
    }
    return std::exp(acc / static_cast<double>(slnr.size()));
}

/// ln sum_l (1 + gamma_l/c)^-1, a smooth stand-in for -min_l gamma_l.
inline double soft_objective(std::span<const double> slnr, double c) {
    double acc = 0.0;
    for (double g : slnr)
        acc += 1.0 / (1.0 + g / c);
    return std::log(acc);
}

/// lambda_l = max_l' ln(1 + gamma_l') / ln(1 + gamma_l)
inline std::vector<double> gm_weights(std::span<const double> slnr) {
    double top = 0.0;
    for (double g : slnr)
        top = std::max(top, std::log1p(g));
    std::vector<double> out;
    out.reserve(slnr.size());
    for (std::size_t l = 0; l < slnr.size(); ++l) {
        const double r = std::log1p(slnr[l]);
        if (!(r > 0.0))
            throw DegenerateUser(static_cast<int>(l));
        out.push_back(top / r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-user surrogates of a side model

namespace detail {
struct Expansion {
    CVector chi_bar;
    double s = 0.0;     // ||chi_bar||^2
    double x_bar = 0.0; // leakage + sigma
    CRowVector sig_row; // v_bar^H signal
};

inline Expansion expand(const SideModel &model, int l) {
    const auto li = static_cast<std::size_t>(l);
    const CVector &v = model.current[li];
    Expansion e;
    e.chi_bar = model.chi_map[li] * v;
    e.s = model.signal_power(l, v);
    e.x_bar = model.leakage_power(l, v) + model.sigma;
    if (!(e.s > 0.0))
        throw DegenerateUser(l);
    e.sig_row = (model.signal[li] * v).adjoint();
    return e;
}
} // namespace detail

/// Minorant of the SLNR of user l in its own vector, tight at model.current.
inline SurrogateCoefficients slnr_minorant_coeffs(const SideModel &model, int l) {
    const auto li = static_cast<std::size_t>(l);
    const auto e = detail::expand(model, l);
    const double x2 = e.x_bar * e.x_bar;
    const double c = e.s / x2;
    SurrogateCoefficients out;
    out.sense = Sense::minorant;
    out.a = -e.s * e.s / x2 - c * model.sigma;
    out.b = ((e.x_bar + e.s) / x2) * e.sig_row;
    out.C = c * (model.signal[li] + model.leakage[li]);
    return out;
}

/// Minorant of ln(1 + SLNR_l), tight at model.current.
inline SurrogateCoefficients log_slnr_minorant_coeffs(const SideModel &model, int l) {
    const auto li = static_cast<std::size_t>(l);
    const auto e = detail::expand(model, l);
    const LogMinorant lm = log_quadratic_minorant(e.chi_bar, e.x_bar);
    SurrogateCoefficients out;
    out.sense = Sense::minorant;
    out.a = lm.alpha - lm.psi * model.sigma;
    out.b = e.sig_row / e.x_bar;
    out.C = lm.psi * (model.signal[li] + model.leakage[li]);
    return out;
}

/// lambda_l times the minorant of ln(1 + SLNR_l).
inline SurrogateCoefficients gm_minorant_coeffs(const SideModel &model, std::span<const double> weights, int l) {
    SurrogateCoefficients out = log_slnr_minorant_coeffs(model, l);
    const double w = weights[static_cast<std::size_t>(l)];
    if (!(w > 0.0))
        throw std::invalid_argument("gm_minorant_coeffs: weights must be positive");
    out.a *= w;
    out.b *= w;
    out.C *= w;
    return out;
}

/// Majorant of ln sum_l (1 + SLNR_l/c)^-1 split per user: the total is
/// constant + sum_l [v_l^H C_l v_l - 2 Re{b_l v_l}]. Per-user entries carry
/// a = 0; the noise terms are folded into the constant.
struct SoftSurrogate {
    double constant = 0.0;
    double chi1 = 0.0;
    std::vector<SurrogateCoefficients> users;

    double value(const std::vector<CVector> &v) const {
        double acc = constant;
        for (std::size_t l = 0; l < users.size(); ++l)
            acc += users[l].value(v[l]);
        return acc;
    }
};

inline SoftSurrogate soft_majorant_coeffs(const SideModel &model, double c) {
    if (!(c > 0.0))
        throw std::domain_error("soft_majorant_coeffs: c must be positive");
    const int L = model.size();
    std::vector<detail::Expansion> ex;
    ex.reserve(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l)
        ex.push_back(detail::expand(model, l));
    std::vector<CVector> chi_bars;
    std::vector<double> x_bars;
    for (const auto &e : ex) {
        chi_bars.push_back(e.chi_bar);
        x_bars.push_back(e.x_bar);
    }
    const SoftMajorant m = softmin_majorant(chi_bars, x_bars, c);
    SoftSurrogate out;
    out.chi1 = m.chi1;
    out.constant = m.constant;
    for (int l = 0; l < L; ++l) {
        const auto li = static_cast<std::size_t>(l);
        const double pi = ex[li].s + c * ex[li].x_bar;
        out.constant += m.w[li] * c * model.sigma;
        SurrogateCoefficients u;
        u.sense = Sense::majorant;
        u.b = ex[li].sig_row / (m.chi1 * pi);
        u.C = m.w[li] * (model.signal[li] + c * model.leakage[li]);
        out.users.push_back(std::move(u));
    }
    return out;
}

// Convenience overloads taking the raw iterate.

inline SurrogateCoefficients slnr_minorant_coeffs(Side side, const BeamformerSet &set, const ChannelStatistics &stats,
                                                  int l) {
    return slnr_minorant_coeffs(build_side_model(side, set, stats, 1.0), l);
}

inline SurrogateCoefficients gm_minorant_coeffs(Side side, const BeamformerSet &set, const ChannelStatistics &stats,
                                                std::span<const double> weights, int l) {
    return gm_minorant_coeffs(build_side_model(side, set, stats, 1.0), weights, l);
}

inline SoftSurrogate soft_majorant_coeffs(Side side, const BeamformerSet &set, const ChannelStatistics &stats,
                                          double c) {
    return soft_majorant_coeffs(build_side_model(side, set, stats, 1.0), c);
}

} // namespace slnrbf

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
#include "slnrbf/surrogates.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace slnrbf {

struct ClosedFormResult {
    std::vector<CVector> v;
    double mu = 0.0;          // multiplier of the power constraint, physical units
    bool constrained = false; // branch 2 taken
    double power = 0.0;       // sum_l v_l^H A_l v_l
};

namespace detail {
inline double ridge_for(const CMatrix &m) {
    const double scale = std::abs(m.trace().real()) / static_cast<double>(std::max<Eigen::Index>(m.rows(), 1));
    return 1e-12 * (scale > 0.0 ? scale : 1.0);
}
} // namespace detail

/// Maximizes sum_l w_l (2 Re{b_l v_l} - v_l^H C_l v_l) subject to
/// sum_l v_l^H A_l v_l <= P. The unconstrained stationary point C_l^-1 b_l^H is
/// returned when it fits the budget; otherwise
/// v_l = w_l (w_l C_l + mu A_l)^-1 b_l^H with mu > 0 set by bisection so the
/// power equals P. Majorant coefficients are handled through the same
/// expression since minimizing a - 2 Re{b v} + v^H C v is the same problem.
inline ClosedFormResult closed_form_update(std::span<const SurrogateCoefficients> coeffs, std::span<const double> weights,
                                           std::span<const CMatrix> coupling, double power_budget) {
    const std::size_t n = coeffs.size();
    if (weights.size() != n || coupling.size() != n)
        throw std::invalid_argument("closed_form_update: size mismatch");
    if (!(power_budget > 0.0))
        throw std::invalid_argument("closed_form_update: power budget must be positive");

    std::vector<CMatrix> wc(n);
    std::vector<CVector> rhs(n);
    double trace_c = 0.0;
    double trace_a = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        if (!(weights[l] > 0.0))
            throw std::invalid_argument("closed_form_update: weights must be positive");
        const CMatrix &c = coeffs[l].C;
        wc[l] = weights[l] * (c + detail::ridge_for(c) * CMatrix::Identity(c.rows(), c.cols()));
        rhs[l] = weights[l] * coeffs[l].b.adjoint();
        trace_c += wc[l].trace().real();
        trace_a += coupling[l].trace().real();
    }

    auto solve_at = [&](double mu) {
        std::vector<CVector> v(n);
        for (std::size_t l = 0; l < n; ++l) {
            CMatrix m = wc[l];
            if (mu > 0.0)
                m += mu * coupling[l];
            // Rounding can leave a nearly singular C slightly indefinite; grow
            // the loading by decades until the factorization succeeds.
            const double base = detail::ridge_for(m);
            Eigen::LLT<CMatrix> chol(m);
            for (int k = 0; chol.info() != Eigen::Success && k < 6; ++k)
                chol.compute(m + base * std::pow(10.0, k) * CMatrix::Identity(m.rows(), m.cols()));
            if (chol.info() != Eigen::Success)
                throw std::runtime_error("closed_form_update: system not positive definite after ridge loading");
            v[l] = chol.solve(rhs[l]);
        }
        return v;
    };
    auto power_of = [&](const std::vector<CVector> &v) {
        double p = 0.0;
        for (std::size_t l = 0; l < n; ++l)
            p += quad_form(coupling[l], v[l]);
        return p;
    };

    ClosedFormResult out;
    out.v = solve_at(0.0);
    out.power = power_of(out.v);
    if (out.power <= power_budget)
        return out;

    if (!(trace_a > 0.0))
        throw std::runtime_error("closed_form_update: zero coupling with an active constraint");
    // Multiplier in units of trace(wC)/trace(A), so the bracket starts near the answer.
    const double unit = trace_c / trace_a;
    auto residual = [&](double m) { return power_of(solve_at(m * unit)) / power_budget - 1.0; };
    double hi = 1.0;
    while (residual(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e300)
            throw BracketError("closed_form_update: could not bracket the multiplier");
    }
    const double m = bisect(residual, 0.0, hi, 1e-13);
    out.mu = m * unit;
    out.constrained = true;
    out.v = solve_at(out.mu);
    out.power = power_of(out.v);
    if (std::abs(out.power / power_budget - 1.0) > 1e-10) {
        const double scale = std::sqrt(power_budget / out.power);
        for (auto &x : out.v)
            x *= scale;
        out.power = power_of(out.v);
    }
    return out;
}

} // namespace slnrbf

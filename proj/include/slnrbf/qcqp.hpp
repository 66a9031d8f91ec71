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

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace slnrbf {

/// maximize min_l q_l(v_l), q_l(v) = a_l + 2 Re{b_l v} - v^H C_l v,
/// subject to sum_l v_l^H A_l v_l <= P.
struct MaxMinQuadraticProblem {
    std::vector<double> a;
    std::vector<CRowVector> b;
    std::vector<CMatrix> C;
    std::vector<CMatrix> A;
    double power_budget = 0.0;

    int size() const { return static_cast<int>(a.size()); }

    double value(int l, const CVector &v) const {
        const auto li = static_cast<std::size_t>(l);
        return a[li] + 2.0 * (b[li] * v)(0, 0).real() - quad_form(C[li], v);
    }

    double min_value(const std::vector<CVector> &v) const {
        double out = std::numeric_limits<double>::infinity();
        for (int l = 0; l < size(); ++l)
            out = std::min(out, value(l, v[static_cast<std::size_t>(l)]));
        return out;
    }

    double power(const std::vector<CVector> &v) const {
        double p = 0.0;
        for (int l = 0; l < size(); ++l)
            p += quad_form(A[static_cast<std::size_t>(l)], v[static_cast<std::size_t>(l)]);
        return p;
    }

    void validate() const {
        const std::size_t n = a.size();
        if (n == 0 || b.size() != n || C.size() != n || A.size() != n)
            throw std::invalid_argument("MaxMinQuadraticProblem: inconsistent user count");
        if (!(power_budget > 0.0))
            throw std::invalid_argument("MaxMinQuadraticProblem: power budget must be positive");
        const Eigen::Index dim = C.front().rows();
        for (std::size_t l = 0; l < n; ++l)
            if (b[l].size() != dim || C[l].rows() != dim || C[l].cols() != dim || A[l].rows() != dim ||
                A[l].cols() != dim)
                throw std::invalid_argument("MaxMinQuadraticProblem: inconsistent dimensions");
    }
};

inline MaxMinQuadraticProblem make_maxmin_problem(std::span<const SurrogateCoefficients> coeffs,
                                                  std::span<const CMatrix> coupling, double power_budget) {
    MaxMinQuadraticProblem p;
    for (std::size_t l = 0; l < coeffs.size(); ++l) {
        if (coeffs[l].sense != Sense::minorant)
            throw std::invalid_argument("make_maxmin_problem: expects minorant coefficients");
        p.a.push_back(coeffs[l].a);
        p.b.push_back(coeffs[l].b);
        p.C.push_back(coeffs[l].C);
        p.A.push_back(coupling[l]);
    }
    p.power_budget = power_budget;
    p.validate();
    return p;
}

struct SubproblemSolution {
    std::vector<CVector> v;
    double objective = 0.0;   // min_l q_l(v_l)
    double dual_bound = 0.0;  // smallest dual value found
    double gap = 0.0;         // (dual_bound - objective)/|objective|, clipped at 0
    int iterations = 0;
    bool certified = false;   // gap <= requested tolerance
    std::vector<double> weights; // simplex multipliers of the certificate
    double mu = 0.0;             // power multiplier of the certificate
    double power = 0.0;
};

/// Maximizer of sum_l lambda_l q_l(v_l) - mu sum_l v_l^H A_l v_l:
///   v_l = lambda_l (lambda_l C_l + mu A_l + eps I)^-1 b_l^H,
/// eps = 1e-10 trace(lambda_l C_l + mu A_l)/dim.
inline std::vector<CVector> dual_inner_argmax(const MaxMinQuadraticProblem &problem, std::span<const double> weights,
                                              double mu) {
    if (!(mu >= 0.0))
        throw std::invalid_argument("dual_inner_argmax: mu must be nonnegative");
    std::vector<CVector> out;
    out.reserve(static_cast<std::size_t>(problem.size()));
    for (int l = 0; l < problem.size(); ++l) {
        const auto li = static_cast<std::size_t>(l);
        const double lambda = weights[li];
        const Eigen::Index dim = problem.C[li].rows();
        if (!(lambda > 0.0)) {
            out.push_back(CVector::Zero(dim));
            continue;
        }
        CMatrix m = lambda * problem.C[li] + mu * problem.A[li];
        const double scale = std::abs(m.trace().real()) / static_cast<double>(dim);
        m += 1e-10 * scale * CMatrix::Identity(dim, dim);
        Eigen::LLT<CMatrix> chol(m);
        if (chol.info() != Eigen::Success || !(scale > 0.0)) {
            Eigen::JacobiSVD<CMatrix> svd(m);
            const RVector sv = svd.singularValues();
            throw std::runtime_error("dual_inner_argmax: singular system, condition estimate " +
                                     std::to_string(sv(0) / std::max(sv(sv.size() - 1), 1e-300)));
        }
        out.push_back(chol.solve(CVector(lambda * problem.b[li].adjoint())));
    }
    return out;
}

/// d(lambda, mu) = mu P + sum_l max_v [lambda_l q_l(v) - mu v^H A_l v] >= optimum.
inline double dual_value(const MaxMinQuadraticProblem &problem, std::span<const double> weights, double mu) {
    const auto v = dual_inner_argmax(problem, weights, mu);
    double d = mu * problem.power_budget;
    for (int l = 0; l < problem.size(); ++l) {
        const auto li = static_cast<std::size_t>(l);
        if (weights[li] > 0.0)
            d += weights[li] * problem.value(l, v[li]) - mu * quad_form(problem.A[li], v[li]);
    }
    return d;
}

namespace detail {

/// One user's problem whitened by the power matrix: with A + eps I = L L^H and
/// L^-1 C L^-H = U diag(d) U^H, the minimum-power point reaching q >= t is
/// v(eta) = L^-H U diag(eta/(1 + eta d)) beta, beta = U^H L^-1 b^H.
struct WhitenedUser {
    double a = 0.0;
    RVector d;
    RVector beta2;
    CVector beta;
    CMatrix back; // L^-H U
    double q_sup = std::numeric_limits<double>::infinity();
    double power_sup = std::numeric_limits<double>::infinity();

    double q(double eta) const {
        double acc = a;
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            const double den = 1.0 + eta * d(i);
            acc += beta2(i) * eta * (2.0 + eta * d(i)) / (den * den);
        }
        return acc;
    }

    double power(double eta) const {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            const double den = 1.0 + eta * d(i);
            acc += beta2(i) * eta * eta / (den * den);
        }
        return acc;
    }

    CVector vector(double eta) const {
        CVector y(beta.size());
        for (Eigen::Index i = 0; i < beta.size(); ++i)
            y(i) = beta(i) * (eta / (1.0 + eta * d(i)));
        return back * y;
    }

    /// Smallest eta with q(eta) >= t, nullopt when t is unreachable.
    std::optional<double> eta_for_level(double t) const {
        if (t <= a)
            return 0.0;
        if (t >= q_sup)
            return std::nullopt;
        const double total = beta2.sum();
        if (!(total > 0.0))
            return std::nullopt;
        double lo = (t - a) / (2.0 * total);
        double hi = 2.0 * lo;
        for (int k = 0; q(hi) < t; ++k) {
            lo = hi;
            hi *= 2.0;
            if (k > 2000 || !std::isfinite(hi))
                return std::nullopt;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (q(mid) < t ? lo : hi) = mid;
        }
        return hi;
    }

    /// eta at which the user alone spends the budget P (infinity if its
    /// unconstrained optimum costs less).
    double eta_for_power(double budget) const {
        if (power_sup <= budget)
            return std::numeric_limits<double>::infinity();
        const double total = beta2.sum();
        double lo = 0.0;
        double hi = std::sqrt(budget / total);
        while (power(hi) < budget) {
            lo = hi;
            hi *= 2.0;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (power(mid) < budget ? lo : hi) = mid;
        }
        return lo;
    }

    double q_at_budget(double budget) const {
        const double eta = eta_for_power(budget);
        return std::isinf(eta) ? q_sup : q(eta);
    }
};

inline WhitenedUser whiten(const MaxMinQuadraticProblem &problem, int l) {
    const auto li = static_cast<std::size_t>(l);
    const CMatrix &A = problem.A[li];
    const Eigen::Index dim = A.rows();
    const double eps = 1e-10 * std::abs(A.trace().real()) / static_cast<double>(dim);
    Eigen::LLT<CMatrix> chol(A + eps * CMatrix::Identity(dim, dim));
    if (chol.info() != Eigen::Success || !(eps > 0.0))
        throw std::runtime_error("solve_maxmin: power matrix is not positive definite after ridge loading");
    const CMatrix l_inv = chol.matrixL().solve(CMatrix::Identity(dim, dim));
    CMatrix cw = l_inv * problem.C[li] * l_inv.adjoint();
    cw = 0.5 * (cw + cw.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(cw);
    WhitenedUser u;
    u.a = problem.a[li];
    u.d = eig.eigenvalues().cwiseMax(0.0);
    u.beta = eig.eigenvectors().adjoint() * (l_inv * problem.b[li].adjoint());
    u.beta2 = u.beta.cwiseAbs2();
    u.back = l_inv.adjoint() * eig.eigenvectors();
    const double dmax = std::max(u.d.maxCoeff(), 0.0);
    double q_sup = u.a;
    double p_sup = 0.0;
    bool bounded = true;
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (u.beta2(i) <= 1e-300)
            continue;
        if (u.d(i) <= 1e-14 * dmax) {
            bounded = false;
            break;
        }
        q_sup += u.beta2(i) / u.d(i);
        p_sup += u.beta2(i) / (u.d(i) * u.d(i));
    }
    if (bounded) {
        u.q_sup = q_sup;
        u.power_sup = p_sup;
    }
    return u;
}

} // namespace detail

/// Max-min of concave quadratics under one power constraint, by bisection on
/// the common level t: t is feasible iff the per-user minimum powers needed to
/// reach q_l >= t sum to at most P. The certificate is the Lagrange point
/// (lambda, mu) implied by those per-user multipliers, plus the single-user
/// bound of the binding user; the reported gap compares the best dual value
/// with the primal objective.
inline SubproblemSolution solve_maxmin(const MaxMinQuadraticProblem &problem, double tol = 1e-5,
                                       const std::vector<CVector> *warm_start = nullptr, int max_iterations = 200) {
    problem.validate();
    if (!(tol > 0.0 && tol < 1.0))
        throw std::invalid_argument("solve_maxmin: tol must lie in (0, 1)");
    const int n = problem.size();
    const double budget = problem.power_budget;
    std::vector<detail::WhitenedUser> users;
    users.reserve(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l)
        users.push_back(detail::whiten(problem, l));

    auto required_power = [&](double t) {
        double total = 0.0;
        for (const auto &u : users) {
            const auto eta = u.eta_for_level(t);
            if (!eta)
                return std::numeric_limits<double>::infinity();
            total += u.power(*eta);
        }
        return total;
    };

    // Upper bound: every user alone with the whole budget.
    int binding = 0;
    double t_hi = std::numeric_limits<double>::infinity();
    for (int l = 0; l < n; ++l) {
        const double q = users[static_cast<std::size_t>(l)].q_at_budget(budget);
        if (q < t_hi) {
            t_hi = q;
            binding = l;
        }
    }
    double t_lo = std::numeric_limits<double>::infinity();
    for (double a : problem.a)
        t_lo = std::min(t_lo, a);
    if (warm_start) {
        const double w = problem.min_value(*warm_start);
        if (w > t_lo && required_power(w) <= budget)
            t_lo = w;
    }
    t_lo = std::min(t_lo, t_hi);

    SubproblemSolution sol;
    const double floor = 1e-300 + 1e-15 * std::max(std::abs(t_hi), std::abs(t_lo));
    while (sol.iterations < max_iterations && t_hi - t_lo > std::max(1e-13 * std::abs(t_hi), floor)) {
        ++sol.iterations;
        const double mid = 0.5 * (t_lo + t_hi);
        (required_power(mid) <= budget ? t_lo : t_hi) = mid;
    }

    // Primal point at the feasible level; a user whose level is out of reach
    // (only possible when t_lo touched t_hi) takes its single-user optimum.
    std::vector<double> etas(static_cast<std::size_t>(n), 0.0);
    sol.v.resize(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        const auto li = static_cast<std::size_t>(l);
        const auto eta = users[li].eta_for_level(t_lo);
        etas[li] = eta ? *eta : users[li].eta_for_power(budget);
        sol.v[li] = users[li].vector(std::min(etas[li], 1e300));
    }
    sol.power = problem.power(sol.v);
    if (sol.power > budget) {
        const double scale = std::sqrt(budget / sol.power);
        for (auto &x : sol.v)
            x *= scale;
        sol.power = problem.power(sol.v);
    }
    sol.objective = problem.min_value(sol.v);
    if (warm_start && problem.min_value(*warm_start) > sol.objective &&
        problem.power(*warm_start) <= budget * (1.0 + 1e-8)) {
        sol.v = *warm_start;
        sol.objective = problem.min_value(sol.v);
        sol.power = problem.power(sol.v);
    }

    // Certificate 1: the single-user bound of the binding user.
    std::vector<double> single(static_cast<std::size_t>(n), 0.0);
    single[static_cast<std::size_t>(binding)] = 1.0;
    const double eta_b = users[static_cast<std::size_t>(binding)].eta_for_power(budget);
    const double mu_single = std::isinf(eta_b) ? 0.0 : 1.0 / eta_b;
    sol.dual_bound = dual_value(problem, single, mu_single);
    sol.weights = single;
    sol.mu = mu_single;
    // Certificate 2: lambda_l = eta_l/sum eta, mu = 1/sum eta from the shared-budget point.
    double eta_sum = 0.0;
    bool finite = true;
    for (double e : etas) {
        finite = finite && std::isfinite(e);
        eta_sum += e;
    }
    if (finite && eta_sum > 0.0) {
        std::vector<double> lambda(etas.size());
        for (std::size_t l = 0; l < etas.size(); ++l)
            lambda[l] = etas[l] / eta_sum;
        const double d = dual_value(problem, lambda, 1.0 / eta_sum);
        if (d < sol.dual_bound) {
            sol.dual_bound = d;
            sol.weights = lambda;
            sol.mu = 1.0 / eta_sum;
        }
    }
    const double scale = std::max(std::abs(sol.objective), 1e-300);
    sol.gap = std::max(sol.dual_bound - sol.objective, 0.0) / scale;
    sol.certified = sol.gap <= tol;
    return sol;
}

} // namespace slnrbf

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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace slnrbf {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;
using RVector = Eigen::VectorXd;

/// Raised when a matrix that must be positive semi-definite has an eigenvalue
/// below the clipping threshold.
class NotPsdError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised by bisect() when the bracket does not contain a sign change.
class BracketError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdClip = 1e-9;

/// Largest deviation |M(i,j) - conj(M(j,i))| over all entries.
inline double hermitian_defect(const CMatrix &m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// True when m is Hermitian to kHermitianTol, scaled by max(1, max|m_ij|).
inline bool is_hermitian(const CMatrix &m, double tol = kHermitianTol) {
    if (m.rows() != m.cols())
        return false;
    if (m.size() == 0)
        return true;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return hermitian_defect(m) <= tol * scale;
}

inline CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

struct HermitianEig {
    RVector values;  // descending
    CMatrix vectors; // unitary, column k pairs with values(k)
};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
inline HermitianEig hermitian_eig(const CMatrix &m) {
    if (!is_hermitian(m)) {
        std::ostringstream msg;
        msg << "hermitian_eig: input is not Hermitian (defect "
            << (m.rows() == m.cols() ? hermitian_defect(m) : -1.0) << ")";
        throw std::invalid_argument(msg.str());
    }
    const CMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eig: eigen-decomposition failed");
    HermitianEig out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-kPsdClip * lambda_max, 0) are clipped to zero; anything lower throws.
inline CMatrix hermitian_sqrt(const CMatrix &m) {
    const HermitianEig eig = hermitian_eig(m);
    if (eig.values.size() == 0)
        return m;
    const double top = std::max(eig.values(0), 0.0);
    const double bottom = eig.values(eig.values.size() - 1);
    if (bottom < -kPsdClip * top || (top == 0.0 && bottom < 0.0)) {
        std::ostringstream msg;
        msg << "hermitian_sqrt: matrix is not PSD (lambda_min " << bottom << ", lambda_max " << top << ")";
        throw NotPsdError(msg.str());
    }
    const RVector root = eig.values.cwiseMax(0.0).cwiseSqrt();
    return eig.vectors * root.asDiagonal() * eig.vectors.adjoint();
}

/// e^x * E1(x) for x > 0. Used directly by the ergodic-rate expansion where
/// e^x alone would overflow.
inline double scaled_exp_integral_e1(double x) {
    if (!(x > 0.0))
        throw std::domain_error("exp_integral_e1: argument must be positive");
    if (x < 1.0) {
        // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
        constexpr double euler_gamma = 0.57721566490153286060651209;
        double sum = 0.0;
        double term = 1.0; // (-x)^k / k!
        for (int k = 1; k < 200; ++k) {
            term *= -x / k;
            const double add = term / k;
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum))
                break;
        }
        return std::exp(x) * (-euler_gamma - std::log(x) - sum);
    }
    // Continued fraction E1(x) = e^-x / (x + 1/(1 + 1/(x + 2/(1 + 2/(x + ...)))))
    // evaluated with the modified Lentz method in its even form.
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            return h;
    }
    throw std::runtime_error("exp_integral_e1: continued fraction did not converge");
}

/// Exponential integral E1(x) = int_1^inf e^{-xu}/u du, x > 0.
inline double exp_integral_e1(double x) {
    if (!(x > 0.0))
        throw std::domain_error("exp_integral_e1: argument must be positive");
    return std::exp(-x) * scaled_exp_integral_e1(x);
}

/// Root of a continuous monotone g on [lo, hi]. Stops once |g(mu)| <= tol or
/// the bracket width is <= tol * max(1, |mu|).
inline double bisect(const std::function<double(double)> &g, double lo, double hi, double tol) {
    if (!(tol > 0.0))
        throw std::invalid_argument("bisect: tolerance must be positive");
    if (lo > hi)
        std::swap(lo, hi);
    double g_lo = g(lo);
    double g_hi = g(hi);
    if (std::abs(g_lo) <= tol)
        return lo;
    if (std::abs(g_hi) <= tol)
        return hi;
    if ((g_lo > 0.0) == (g_hi > 0.0)) {
        std::ostringstream msg;
        msg << "bisect: bracket failure, g(" << lo << ")=" << g_lo << " and g(" << hi << ")=" << g_hi
            << " share a sign";
        throw BracketError(msg.str());
    }
    const int cap = static_cast<int>(std::ceil(std::log2(std::max((hi - lo) / tol, 1.0)))) + 2;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < cap; ++it) {
        mid = 0.5 * (lo + hi);
        const double g_mid = g(mid);
        if (std::abs(g_mid) <= tol)
            return mid;
        if ((g_mid > 0.0) == (g_lo > 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= tol * std::max(1.0, std::abs(0.5 * (lo + hi))))
            return 0.5 * (lo + hi);
    }
    return 0.5 * (lo + hi);
}

/// Unit vector maximizing (w^H B w) / (w^H A w) for A positive definite.
/// The phase is fixed so the largest-magnitude entry is real and positive.
inline CVector largest_generalized_eigvec(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        throw std::invalid_argument("largest_generalized_eigvec: dimension mismatch");
    if (!is_hermitian(a) || !is_hermitian(b))
        throw std::invalid_argument("largest_generalized_eigvec: inputs must be Hermitian");
    const CMatrix a_sym = 0.5 * (a + a.adjoint());
    const CMatrix b_sym = 0.5 * (b + b.adjoint());
    Eigen::LLT<CMatrix> chol(a_sym);
    if (chol.info() != Eigen::Success)
        throw std::invalid_argument("largest_generalized_eigvec: A is not positive definite");
    Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> solver(b_sym, a_sym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("largest_generalized_eigvec: decomposition failed");
    CVector w = solver.eigenvectors().col(a.rows() - 1);
    w.normalize();
    Eigen::Index k = 0;
    w.cwiseAbs().maxCoeff(&k);
    if (std::abs(w(k)) > 0.0)
        w *= std::conj(w(k)) / std::abs(w(k));
    return w;
}

/// Solve (m) x = rhs for Hermitian positive definite m, falling back to a
/// pivoted LDLT when Cholesky rejects it.
inline CVector hermitian_solve(const CMatrix &m, const CVector &rhs) {
    Eigen::LLT<CMatrix> chol(m);
    if (chol.info() == Eigen::Success)
        return chol.solve(rhs);
    Eigen::LDLT<CMatrix> ldlt(m);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("hermitian_solve: singular system");
    return ldlt.solve(rhs);
}

/// Real part of x^H M x.
inline double quad_form(const CMatrix &m, const CVector &x) {
    return x.dot(m * x).real();
}

} // namespace slnrbf

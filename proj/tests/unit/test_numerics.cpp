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


#include "slnrbf/numerics.hpp"
#include "support/random.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace slnrbf;
using slnrbf::testing::random_hermitian;
using slnrbf::testing::random_psd;
using slnrbf::testing::random_vector;

namespace {

// Independent reference: Boost's series/rational-approximation E1.
double e1_reference(double x) { return boost::math::expint(1, x); }

double rayleigh(const CMatrix &a, const CMatrix &b, const CVector &w) { return quad_form(b, w) / quad_form(a, w); }

} // namespace

TEST(HermitianEig, IdentityHasUnitEigenvalues) {
    const auto eig = hermitian_eig(CMatrix::Identity(3, 3));
    for (int i = 0; i < 3; ++i)
        EXPECT_DOUBLE_EQ(eig.values(i), 1.0);
}

TEST(HermitianEig, DiagonalSortedDescending) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = 2.0;
    const auto eig = hermitian_eig(m);
    EXPECT_DOUBLE_EQ(eig.values(0), 2.0);
    EXPECT_DOUBLE_EQ(eig.values(1), 1.0);
    EXPECT_NEAR(std::abs(eig.vectors(1, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(eig.vectors(0, 1)), 1.0, 1e-14);
}

TEST(HermitianEig, RandomReconstruction) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix m = random_hermitian(6, rng);
        const auto eig = hermitian_eig(m);
        const CMatrix back = eig.vectors * eig.values.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
        EXPECT_LT((back - m).norm() / m.norm(), 1e-9);
        for (int i = 1; i < 6; ++i)
            EXPECT_GE(eig.values(i - 1), eig.values(i));
        EXPECT_LT((eig.vectors.adjoint() * eig.vectors - CMatrix::Identity(6, 6)).norm(), 1e-12);
    }
}

TEST(HermitianEig, RejectsNonHermitian) {
    CMatrix m = CMatrix::Identity(2, 2);
    m(0, 1) = 1.0;
    EXPECT_THROW(hermitian_eig(m), std::invalid_argument);
}

TEST(HermitianSqrt, IdentityAndDiagonal) {
    EXPECT_LT((hermitian_sqrt(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm(), 1e-14);
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    const CMatrix r = hermitian_sqrt(d);
    EXPECT_NEAR(r(0, 0).real(), 2.0, 1e-14);
    EXPECT_NEAR(r(1, 1).real(), 3.0, 1e-14);
    EXPECT_NEAR(std::abs(r(0, 1)), 0.0, 1e-14);
}

TEST(HermitianSqrt, SquaringOracleUpTo32) {
    Rng rng(12);
    std::uniform_int_distribution<int> size(1, 32);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = size(rng);
        const CMatrix m = random_psd(n, rng, trial % 3 == 0 ? std::max(1, n / 2) : n);
        const CMatrix r = hermitian_sqrt(m);
        EXPECT_LT((r * r - m).norm() / m.norm(), 1e-8) << "n=" << n;
        EXPECT_TRUE(is_hermitian(r));
    }
}

TEST(HermitianSqrt, RejectsIndefinite) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -0.5;
    EXPECT_THROW(hermitian_sqrt(m), NotPsdError);
}

TEST(HermitianSqrt, ClipsTinyNegativeEigenvalues) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1e-12;
    const CMatrix r = hermitian_sqrt(m);
    EXPECT_NEAR(r(1, 1).real(), 0.0, 1e-15);
}

TEST(ExpIntegral, KnownValuesAgainstReference) {
    EXPECT_NEAR(exp_integral_e1(1.0), 0.21938393439552027, 1e-15);
    EXPECT_LT(slnrbf::testing::relative_error(exp_integral_e1(1.0), e1_reference(1.0)), 1e-12);
    EXPECT_LT(slnrbf::testing::relative_error(exp_integral_e1(10.0), e1_reference(10.0)), 1e-12);
    EXPECT_NEAR(exp_integral_e1(10.0), 4.15697e-6, 1e-11);
}

TEST(ExpIntegral, LogGridMatchesReference) {
    for (int i = 0; i <= 60; ++i) {
        const double x = std::pow(10.0, -3.0 + i * (std::log10(50.0) + 3.0) / 60.0);
        EXPECT_LT(slnrbf::testing::relative_error(exp_integral_e1(x), e1_reference(x)), 1e-12) << "x=" << x;
        EXPECT_LT(slnrbf::testing::relative_error(scaled_exp_integral_e1(x), std::exp(x) * e1_reference(x)), 1e-12);
    }
}

TEST(ExpIntegral, StrictlyDecreasing) {
    EXPECT_LT(exp_integral_e1(2.0), exp_integral_e1(1.0));
    double prev = exp_integral_e1(1e-3);
    for (double x = 2e-3; x < 60.0; x *= 1.1) {
        const double cur = exp_integral_e1(x);
        EXPECT_LT(cur, prev);
        prev = cur;
    }
}

TEST(ExpIntegral, DomainError) {
    EXPECT_THROW(exp_integral_e1(0.0), std::domain_error);
    EXPECT_THROW(exp_integral_e1(-1.0), std::domain_error);
}

TEST(Bisect, LinearRoot) { EXPECT_NEAR(bisect([](double m) { return m - 3.0; }, 0.0, 10.0, 1e-12), 3.0, 1e-11); }

TEST(Bisect, AlgebraicRoot) {
    const double root = bisect([](double m) { return 1.0 / ((1.0 + m) * (1.0 + m)) - 0.25; }, 0.0, 10.0, 1e-13);
    EXPECT_NEAR(root, 1.0, 1e-10);
}

TEST(Bisect, BracketFailure) {
    EXPECT_THROW(bisect([](double m) { return m + 1.0; }, 0.0, 10.0, 1e-9), BracketError);
}

TEST(Bisect, IterationBound) {
    const double lo = 0.0;
    const double hi = 1000.0;
    const double tol = 1e-9;
    int calls = 0;
    bisect(
        [&](double m) {
            ++calls;
            return m - std::numbers::pi;
        },
        lo, hi, tol);
    const int bound = static_cast<int>(std::ceil(std::log2((hi - lo) / tol))) + 2;
    EXPECT_LE(calls - 2, bound); // two endpoint evaluations precede the loop
}

TEST(GeneralizedEigvec, IdentityPicksLargestDiagonal) {
    CMatrix b = CMatrix::Zero(3, 3);
    b(0, 0) = 1.0;
    b(1, 1) = 5.0;
    b(2, 2) = 2.0;
    const CVector w = largest_generalized_eigvec(CMatrix::Identity(3, 3), b);
    EXPECT_NEAR(std::abs(w(1)), 1.0, 1e-12);
    EXPECT_NEAR(w.norm(), 1.0, 1e-14);
}

TEST(GeneralizedEigvec, ScaleInvariantInA) {
    Rng rng(13);
    const CMatrix b = random_psd(5, rng);
    const CVector w1 = largest_generalized_eigvec(CMatrix::Identity(5, 5), b);
    const CVector w2 = largest_generalized_eigvec(2.0 * CMatrix::Identity(5, 5), b);
    EXPECT_NEAR(std::abs(w1.dot(w2)), 1.0, 1e-10);
}

TEST(GeneralizedEigvec, RandomProbeOracle) {
    Rng rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        const CMatrix a = random_psd(6, rng) + 0.1 * CMatrix::Identity(6, 6);
        const CMatrix b = random_psd(6, rng, 3);
        const CVector w = largest_generalized_eigvec(a, b);
        const double best = rayleigh(a, b, w);
        for (int probe = 0; probe < 1000; ++probe) {
            const CVector u = random_vector(6, rng).normalized();
            EXPECT_GE(best * (1.0 + 1e-8), rayleigh(a, b, u));
        }
    }
}

TEST(GeneralizedEigvec, StationaryByFiniteDifferences) {
    Rng rng(15);
    const CMatrix a = random_psd(5, rng) + 0.5 * CMatrix::Identity(5, 5);
    const CMatrix b = random_psd(5, rng);
    const CVector w = largest_generalized_eigvec(a, b);
    const double h = 1e-6;
    double grad_sq = 0.0;
    for (int i = 0; i < 5; ++i) {
        for (const cplx dir : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
            CVector up = w;
            CVector down = w;
            up(i) += h * dir;
            down(i) -= h * dir;
            const double d = (rayleigh(a, b, up) - rayleigh(a, b, down)) / (2.0 * h);
            grad_sq += d * d;
        }
    }
    EXPECT_LE(std::sqrt(grad_sq), 1e-6 * std::max(1.0, rayleigh(a, b, w)));
}

TEST(GeneralizedEigvec, RejectsSingularA) {
    CMatrix a = CMatrix::Identity(2, 2);
    a(1, 1) = 0.0;
    EXPECT_THROW(largest_generalized_eigvec(a, CMatrix::Identity(2, 2)), std::invalid_argument);
}

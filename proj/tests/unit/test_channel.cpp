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


#include "slnrbf/channel.hpp"
#include "support/random.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace slnrbf;

namespace {

Scenario four_by_four() {
    Scenario s;
    s.Q = 4;
    s.L = 3;
    return s;
}

std::vector<double> sorted_eigenvalues(const CMatrix &m) {
    const RVector v = hermitian_eig(m).values;
    return {v.data(), v.data() + v.size()};
}

} // namespace

TEST(Units, DbmAndNoise) {
    EXPECT_NEAR(dbm_to_watt(30.0), 1.0, 1e-15);
    EXPECT_NEAR(watt_to_dbm(dbm_to_watt(24.0)), 24.0, 1e-12);
    EXPECT_NEAR(noise_power_w(-174.0, 10e6), std::pow(10.0, -17.4) * 1e-3 * 1e7, 1e-25);
}

TEST(Pathloss, PaperValues) {
    EXPECT_NEAR(pathloss_db(1.0, 0.0), 28.8, 1e-12);
    EXPECT_NEAR(pathloss_db(100.0, 0.0), 99.4, 1e-12);
    EXPECT_NEAR(pathloss_db(10.0, 7.8), 71.9, 1e-12);
    EXPECT_NEAR(path_gain_from_db(30.0), 1e-3, 1e-18);
    EXPECT_THROW(pathloss_db(0.0, 0.0), std::domain_error);
    EXPECT_THROW(pathloss_db(-3.0, 0.0), std::domain_error);
}

TEST(PlaceUsers, DeterministicAndInsideCell) {
    Scenario s = four_by_four();
    s.L = 50;
    Rng a(5);
    Rng b(5);
    const auto ua = place_users(s, a);
    const auto ub = place_users(s, b);
    ASSERT_EQ(ua.size(), 50U);
    for (std::size_t i = 0; i < ua.size(); ++i) {
        EXPECT_EQ(ua[i].distance_m, ub[i].distance_m);
        EXPECT_EQ(ua[i].azimuth_rad, ub[i].azimuth_rad);
        EXPECT_EQ(ua[i].shadow_db, ub[i].shadow_db);
        EXPECT_GT(ua[i].distance_m, 0.0);
        EXPECT_LE(ua[i].distance_m, 200.0);
        EXPECT_GT(ua[i].path_gain, 0.0);
        EXPECT_GT(ua[i].elevation_rad, std::numbers::pi / 2.0);
        EXPECT_LT(ua[i].elevation_rad, std::numbers::pi);
    }
}

TEST(PlaceUsers, AreaLawKolmogorovSmirnov) {
    Scenario s = four_by_four();
    s.L = 10000;
    Rng rng(99);
    auto users = place_users(s, rng);
    std::vector<double> d;
    for (const auto &u : users)
        d.push_back(u.distance_m);
    std::sort(d.begin(), d.end());
    const double r0 = s.min_radius_m * s.min_radius_m;
    const double r1 = s.cell_radius_m * s.cell_radius_m;
    double ks = 0.0;
    const double n = static_cast<double>(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double cdf = (d[i] * d[i] - r0) / (r1 - r0);
        ks = std::max({ks, std::abs(cdf - i / n), std::abs((i + 1) / n - cdf)});
    }
    EXPECT_LT(ks, 1.628 / std::sqrt(n)); // 1% critical value
}

TEST(VerticalCorrelation, UnitDiagonalAndPureSteering) {
    const CMatrix r = vertical_correlation(deg_to_rad(60.0), deg_to_rad(5.0), 4);
    for (int i = 0; i < 4; ++i)
        EXPECT_NEAR(std::abs(r(i, i) - 1.0), 0.0, 1e-12);
    EXPECT_TRUE(is_hermitian(r));
    const CMatrix pure = vertical_correlation(deg_to_rad(60.0), 0.0, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            EXPECT_NEAR(std::abs(pure(i, j)), 1.0, 1e-14);
}

TEST(VerticalCorrelation, PsdWithinClip) {
    const CMatrix r = vertical_correlation(deg_to_rad(60.0), deg_to_rad(5.0), 4);
    const auto ev = sorted_eigenvalues(r);
    EXPECT_GE(ev.back(), -kPsdClip * ev.front());
    EXPECT_NO_THROW(hermitian_sqrt(r));
}

TEST(HorizontalCorrelation, UnitDiagonalBoundedHermitianPsd) {
    Rng rng(21);
    std::uniform_real_distribution<double> alpha(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> beta(0.0, std::numbers::pi);
    for (int trial = 0; trial < 1000; ++trial) {
        const CMatrix r = horizontal_correlation(alpha(rng), beta(rng), deg_to_rad(5.0), deg_to_rad(5.0), 4);
        for (int i = 0; i < 4; ++i)
            ASSERT_NEAR(std::abs(r(i, i) - 1.0), 0.0, 1e-12);
        ASSERT_LE(r.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
        ASSERT_LE(hermitian_defect(r), 1e-12);
        if (trial < 100) {
            const auto ev = sorted_eigenvalues(r);
            EXPECT_GE(ev.back(), -kPsdClip * ev.front());
        }
    }
}

TEST(CovariancePair, IdentityFactorsAndTrace) {
    Scenario s = four_by_four();
    s.sigma_alpha_rad = 0.0;
    s.sigma_beta_rad = 0.0;
    UserGeometry g{50.0, 0.3, 1.8, 0.0, 2.5e-7};
    const auto [r, rt] = covariance_pair(g, s);
    EXPECT_NEAR(r.trace().real(), g.path_gain * 16.0, 1e-18);
    EXPECT_NEAR(rt.trace().real(), g.path_gain * 16.0, 1e-18);
    // Kronecker of identities
    const CMatrix eye = CMatrix::Identity(4, 4);
    EXPECT_LT((kron(eye, eye.transpose()) - CMatrix::Identity(16, 16)).norm(), 1e-15);
}

TEST(CovariancePair, SharedSpectrumForGeneratedUsers) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Scenario s = four_by_four();
        s.seed = seed;
        const auto stats = generate_statistics(s);
        for (const auto &u : stats.users) {
            const auto a = sorted_eigenvalues(u.R);
            const auto b = sorted_eigenvalues(u.R_tilde);
            for (std::size_t i = 0; i < a.size(); ++i)
                EXPECT_NEAR(a[i], b[i], 1e-8 * a.front());
            for (int i = 0; i < 4; ++i) {
                EXPECT_NEAR(std::abs(u.R_v(i, i) - 1.0), 0.0, 1e-12);
                EXPECT_NEAR(std::abs(u.R_h(i, i) - 1.0), 0.0, 1e-12);
            }
            EXPECT_LT((u.sqrt_R * u.sqrt_R - u.R).norm(), 1e-8 * u.R.norm());
            EXPECT_LT((u.sqrt_R_tilde * u.sqrt_R_tilde - u.R_tilde).norm(), 1e-8 * u.R_tilde.norm());
        }
    }
}

TEST(CovariancePair, HundredGeometriesHermitianUnitDiagonal) {
    Scenario s = four_by_four();
    s.L = 100;
    Rng rng(31);
    const auto stats = build_statistics(s, place_users(s, rng));
    for (const auto &u : stats.users) {
        EXPECT_TRUE(is_hermitian(u.R_v));
        EXPECT_TRUE(is_hermitian(u.R_h));
        for (int i = 0; i < 4; ++i) {
            EXPECT_NEAR(u.R_v(i, i).real(), 1.0, 1e-12);
            EXPECT_NEAR(u.R_h(i, i).real(), 1.0, 1e-12);
        }
    }
}

TEST(SampleChannel, WhiteCase) {
    UserStatistics u;
    u.geometry.path_gain = 1.0;
    u.R_v = u.R_h = u.sqrt_R_v = u.sqrt_R_h = CMatrix::Identity(3, 3);
    Rng rng(41);
    CMatrix acc = CMatrix::Zero(9, 9);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const CVector h = vec(sample_channel(u, rng));
        acc += h * h.adjoint();
    }
    acc /= n;
    EXPECT_LT((acc - CMatrix::Identity(9, 9)).norm() / 3.0, 0.02);
}

TEST(SampleChannel, Deterministic) {
    const auto stats = generate_statistics(four_by_four());
    Rng a(3);
    Rng b(3);
    EXPECT_EQ((sample_channel(stats[0], a) - sample_channel(stats[0], b)).norm(), 0.0);
}

TEST(SampleChannel, MonteCarloMatchesBothCovariances) {
    const auto stats = generate_statistics(four_by_four());
    const UserStatistics &u = stats[1];
    Rng rng(43);
    const int n = 100000;
    CMatrix acc_h = CMatrix::Zero(16, 16);
    CMatrix acc_t = CMatrix::Zero(16, 16);
    for (int i = 0; i < n; ++i) {
        const CMatrix h = sample_channel(u, rng) / std::sqrt(u.geometry.path_gain);
        const CVector hv = vec(h);
        const CVector ht = vec(h.transpose());
        acc_h.noalias() += hv * hv.adjoint();
        acc_t.noalias() += ht.conjugate() * ht.transpose();
    }
    acc_h /= n;
    acc_t /= n;
    const CMatrix want_h = kron(u.R_h.transpose(), u.R_v); // E[h h^H]
    const CMatrix want_t = u.R_tilde / u.geometry.path_gain;
    EXPECT_LT((acc_h - want_h).norm() / want_h.norm(), 0.02);
    EXPECT_LT((acc_t - want_t).norm() / want_t.norm(), 0.02);
    // E[conj(h) h^T] is the stored R
    EXPECT_LT((want_h.conjugate() - u.R / u.geometry.path_gain).norm(), 1e-12 * want_h.norm());
}

TEST(ScenarioValidation, RejectsBadFields) {
    Scenario s;
    s.M = 5;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = Scenario{};
    s.power_w = 0.0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = Scenario{};
    s.sigma_w = -1.0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
}

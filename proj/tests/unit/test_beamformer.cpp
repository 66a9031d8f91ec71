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


#include "slnrbf/beamformer.hpp"
#include "support/random.hpp"

#include <gtest/gtest.h>

using namespace slnrbf;
using slnrbf::testing::random_matrix;
using slnrbf::testing::random_set;

namespace {

// Direct sum_m (v^e_m)^T H v^a_m from the stacked vectors.
cplx bilinear(const BeamformerSet &set, int l, const CMatrix &h) {
    cplx acc = 0.0;
    for (int m = 0; m < set.M; ++m) {
        const CVector ve = set.elevation[static_cast<std::size_t>(l)].segment(m * set.Q, set.Q);
        const CVector va = set.azimuth[static_cast<std::size_t>(l)].segment(m * set.Q, set.Q);
        acc += (ve.transpose() * h * va)(0, 0);
    }
    return acc;
}

double magnitude_scale(const BeamformerSet &set, int l, const CMatrix &h) {
    return h.norm() * set.azimuth[static_cast<std::size_t>(l)].norm() * set.elevation[static_cast<std::size_t>(l)].norm();
}

} // namespace

TEST(FullBeamformer, SingleOuterProduct) {
    BeamformerSet set(3, 1, 1);
    set.elevation[0](0) = 1.0;
    set.azimuth[0](1) = 1.0;
    const CMatrix v = full_beamformer(set, 0);
    CMatrix want = CMatrix::Zero(3, 3);
    want(0, 1) = 1.0;
    EXPECT_EQ((v - want).norm(), 0.0);
}

TEST(FullBeamformer, RankAtMostM) {
    Rng rng(1);
    for (int M : {1, 2, 3}) {
        const auto set = random_set(5, M, 2, rng);
        Eigen::JacobiSVD<CMatrix> svd(full_beamformer(set, 1));
        const RVector s = svd.singularValues();
        for (int i = M; i < s.size(); ++i)
            EXPECT_LT(s(i), 1e-10 * s(0));
    }
}

TEST(FullBeamformer, InnerProductMatchesBilinearForm) {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto set = random_set(4, 2, 3, rng);
        const CMatrix h = random_matrix(4, 4, rng);
        for (int l = 0; l < 3; ++l) {
            const cplx via_trace = (h.array() * full_beamformer(set, l).array()).sum(); // vec(H)^T vec(V)
            EXPECT_LT(std::abs(via_trace - bilinear(set, l, h)), 1e-12 * magnitude_scale(set, l, h));
        }
    }
}

TEST(TotalPower, UnitRankOne) {
    BeamformerSet set(4, 1, 1);
    set.azimuth[0](2) = 1.0;
    set.elevation[0](3) = 1.0;
    EXPECT_DOUBLE_EQ(total_power(set), 1.0);
}

TEST(TotalPower, ThreeWayIdentity) {
    Rng rng(3);
    std::uniform_int_distribution<int> pick_m(1, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const int M = pick_m(rng);
        const auto set = random_set(4, M, 3, rng);
        const double direct = total_power(set);
        double via_az = 0.0;
        double via_el = 0.0;
        for (int l = 0; l < 3; ++l) {
            via_az += quad_form(coupling_matrix(Side::azimuth, set, l), set.azimuth[static_cast<std::size_t>(l)]);
            via_el += quad_form(coupling_matrix(Side::elevation, set, l), set.elevation[static_cast<std::size_t>(l)]);
        }
        EXPECT_LT(slnrbf::testing::relative_error(via_az, direct), 1e-10);
        EXPECT_LT(slnrbf::testing::relative_error(via_el, direct), 1e-10);
        EXPECT_LT(slnrbf::testing::relative_error(total_power(vectorize(set)), direct), 1e-10);
    }
}

TEST(CouplingMatrix, OrthonormalFixedSideGivesIdentity) {
    BeamformerSet set(3, 2, 1);
    set.elevation[0](0) = 1.0;     // e_1 in block 1
    set.elevation[0](3 + 1) = 1.0; // e_2 in block 2
    const CMatrix a = coupling_matrix(Side::azimuth, set, 0);
    EXPECT_LT((a - CMatrix::Identity(6, 6)).norm(), 1e-15);
}

TEST(CouplingMatrix, SingleOuterProductIsScaledIdentity) {
    Rng rng(4);
    const auto set = random_set(4, 1, 1, rng);
    const CMatrix a = coupling_matrix(Side::elevation, set, 0);
    EXPECT_LT((a - set.azimuth[0].squaredNorm() * CMatrix::Identity(4, 4)).norm(), 1e-12);
    const auto eig = hermitian_eig(coupling_matrix(Side::azimuth, set, 0));
    EXPECT_GE(eig.values.minCoeff(), 0.0);
}

TEST(PsiMatrix, ColumnSelectorStructure) {
    BeamformerSet set(3, 1, 1);
    set.elevation[0](0) = 1.0;
    const CMatrix psi = psi_matrix(Side::azimuth, set, 0);
    ASSERT_EQ(psi.rows(), 9);
    ASSERT_EQ(psi.cols(), 3);
    EXPECT_EQ((psi.topRows(3) - CMatrix::Identity(3, 3)).norm(), 0.0);
    EXPECT_EQ(psi.bottomRows(6).norm(), 0.0);
}

TEST(PsiMatrix, BilinearIdentitiesBothSides) {
    Rng rng(5);
    std::uniform_int_distribution<int> pick_m(1, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const int M = pick_m(rng);
        const auto set = random_set(4, M, 1, rng);
        const CMatrix h = random_matrix(4, 4, rng);
        const cplx want = bilinear(set, 0, h);
        const cplx az = (vec(h.transpose()).transpose() * psi_matrix(Side::azimuth, set, 0) * set.azimuth[0])(0, 0);
        const cplx el = (vec(h).transpose() * psi_matrix(Side::elevation, set, 0) * set.elevation[0])(0, 0);
        const double scale = magnitude_scale(set, 0, h);
        EXPECT_LT(std::abs(az - want), 1e-12 * scale);
        EXPECT_LT(std::abs(el - want), 1e-12 * scale);
    }
}

TEST(InitFeasible, ExactPowerAndDeterminism) {
    Scenario s = slnrbf::testing::desk_scenario(3, 4, 3, 2);
    Rng a(17);
    Rng b(17);
    const auto set = init_feasible(s, a);
    const auto again = init_feasible(s, b);
    EXPECT_LT(slnrbf::testing::relative_error(total_power(set), s.power_w), 1e-12);
    for (int l = 0; l < 3; ++l)
        EXPECT_EQ((set.azimuth[static_cast<std::size_t>(l)] - again.azimuth[static_cast<std::size_t>(l)]).norm(), 0.0);
    BeamformerSet doubled = set;
    for (auto &v : doubled.azimuth)
        v *= 2.0;
    EXPECT_LT(slnrbf::testing::relative_error(total_power(doubled), 4.0 * s.power_w), 1e-12);
}

TEST(SideModel, SlnrAgreesAcrossSides) {
    Scenario s = slnrbf::testing::desk_scenario(8, 4, 3, 2);
    const auto stats = generate_statistics(s);
    Rng rng(6);
    const auto set = init_feasible(s, rng);
    const auto az = build_side_model(Side::azimuth, set, stats, s.power_w);
    const auto el = build_side_model(Side::elevation, set, stats, s.power_w);
    for (int l = 0; l < 3; ++l) {
        const double a = az.slnr(l, set.azimuth[static_cast<std::size_t>(l)]);
        const double e = el.slnr(l, set.elevation[static_cast<std::size_t>(l)]);
        EXPECT_LT(slnrbf::testing::relative_error(a, e), 1e-9);
        const CVector chi = az.chi_map[static_cast<std::size_t>(l)] * set.azimuth[static_cast<std::size_t>(l)];
        EXPECT_LT(slnrbf::testing::relative_error(chi.squaredNorm(), az.signal_power(l, set.azimuth[static_cast<std::size_t>(l)])), 1e-10);
    }
    EXPECT_LT(slnrbf::testing::relative_error(az.power(set.azimuth), s.power_w), 1e-10);
}

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

#include <random>

namespace slnrbf::testing {

inline CMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng &rng) { return complex_gaussian(rows, cols, rng); }

inline CVector random_vector(Eigen::Index n, Rng &rng) { return complex_gaussian(n, 1, rng); }

inline CMatrix random_hermitian(Eigen::Index n, Rng &rng) {
    const CMatrix g = random_matrix(n, n, rng);
    return 0.5 * (g + g.adjoint());
}

/// G G^H with G n x rank; PSD, singular when rank < n.
inline CMatrix random_psd(Eigen::Index n, Rng &rng, Eigen::Index rank = -1) {
    const CMatrix g = random_matrix(n, rank < 0 ? n : rank, rng);
    CMatrix m = g * g.adjoint();
    return 0.5 * (m + m.adjoint());
}

inline BeamformerSet random_set(int Q, int M, int L, Rng &rng) {
    BeamformerSet set(Q, M, L);
    for (int l = 0; l < L; ++l) {
        set.azimuth[static_cast<std::size_t>(l)] = random_vector(Q * M, rng);
        set.elevation[static_cast<std::size_t>(l)] = random_vector(Q * M, rng);
    }
    return set;
}

inline double relative_error(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline Scenario desk_scenario(std::uint64_t seed, int Q = 4, int L = 3, int M = 1) {
    Scenario s;
    s.Q = Q;
    s.L = L;
    s.M = M;
    s.seed = seed;
    return s;
}

} // namespace slnrbf::testing

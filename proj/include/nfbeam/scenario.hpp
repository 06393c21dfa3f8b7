// SPDX-License-Identifier: Apache-2.0
//
// nfbeam - near-field wideband hybrid beamforming library and simulator
// Copyright (C) 2026 nfbeam contributors
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

#ifndef NFBEAM_SCENARIO_HPP
#define NFBEAM_SCENARIO_HPP

#include "config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nfbeam {

struct UserGeometry {
    double angle = 0.5 * pi; // theta, rad, in (0, pi)
    double range = 10.0;     // r, m
    double noise_var = 0.0;  // per-subcarrier noise power, W
};

enum class ReflectionModel { Simplified, Fresnel };

struct ScattererGeometry {
    double angle = 0.5 * pi;            // rad
    double range = 5.0;                 // m
    double incidence = 0.0;             // phi_in, rad, in [0, pi/2)
    double impedance = 188.5;           // Z(f) of the reflecting material, ohm
    double roughness = 1e-4;            // sigma_r, m
    double avg_reflection_db = -15.0;   // simplified-mode magnitude
    double phase = 0.0;                 // simplified-mode reflection phase, rad
    ReflectionModel model = ReflectionModel::Simplified;
};

// User and scatterer geometry for one channel realization.
struct Scenario {
    std::vector<UserGeometry> users;
    std::vector<std::vector<ScattererGeometry>> scatterers; // per user
    std::uint64_t rng_seed = 0;

    void validate(const SystemConfig &cfg) const;

    std::string to_json() const;
    static Scenario from_json(const std::string &text);
};

// Draws K users with r ~ U[5, 15] m and theta ~ U[pi/6, 5 pi/6], plus
// n_scatterers scatterers per user with ranges in [1, r_k] and angles from
// the same angular interval. Deterministic given the seed.
Scenario sample_scenario(std::uint64_t seed, const SystemConfig &cfg, int n_scatterers = 4);

} // namespace nfbeam

#endif

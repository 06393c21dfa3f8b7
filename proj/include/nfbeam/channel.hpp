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

#ifndef NFBEAM_CHANNEL_HPP
#define NFBEAM_CHANNEL_HPP

#include "scenario.hpp"

namespace nfbeam {

// Distance from antenna n (1-based) to a point at (range r, angle theta),
// spherical-wavefront model.
double propagation_distance(int n, double r, double theta, const SystemConfig &cfg);

// Near-field array response b(f, theta, r); every entry has unit modulus,
// entry n carries the excess propagation delay of antenna n relative to the
// array center.
VectorXcd array_response(double f, double theta, double r, const SystemConfig &cfg);

// Free-space LoS gain magnitude alpha(f, r) including medium absorption.
double los_gain(double f, double r, const SystemConfig &cfg);

// Complex reflection coefficient of one scatterer. Fresnel mode evaluates the
// material model; simplified mode returns the configured average magnitude
// with the scatterer's stored phase.
cxd reflection_coeff(double f, const ScattererGeometry &s);

// M x K set of length-N channel vectors h_{m,k}.
struct ChannelTensor {
    std::vector<MatrixXcd> h; // per subcarrier, N x K (column k = user k)

    int n_subcarriers() const { return int(h.size()); }
    int n_users() const { return h.empty() ? 0 : int(h.front().cols()); }
    int n_antennas() const { return h.empty() ? 0 : int(h.front().rows()); }

    const MatrixXcd &operator[](int m) const { return h[size_t(m)]; }
};

// Assembles the multipath channel for every (subcarrier, user) pair.
ChannelTensor build_channel(const Scenario &scn, const SystemConfig &cfg);

} // namespace nfbeam

#endif

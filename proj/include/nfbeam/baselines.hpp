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

#ifndef NFBEAM_BASELINES_HPP
#define NFBEAM_BASELINES_HPP

#include "solver_hts.hpp"

namespace nfbeam {
namespace baselines {

// Conjugate phase match against the chain response at the center frequency;
// all delays zero.
hts::AnalogChainDesign cf_analog(double theta, double r, const SystemConfig &cfg, int chain = 0);

// Conjugate phase of the subcarrier-averaged chain response; delays zero.
hts::AnalogChainDesign mcm_analog(double theta, double r, const SystemConfig &cfg, int chain = 0);

// Phase projection of the principal eigenvector of the averaged response
// covariance (power iteration); delays zero.
hts::AnalogChainDesign mccm_analog(double theta, double r, const SystemConfig &cfg, int chain = 0);

// Planar-wavefront phases at angle theta with the far-field inter-group
// delays, clipped to [0, t_max].
hts::AnalogChainDesign far_field_dpp(double theta, const SystemConfig &cfg, int chain = 0);

// Per-group planar phases at each group's local angle combined with the
// near-field alignment delays, clipped to [0, t_max].
hts::AnalogChainDesign near_field_pdf(double theta, double r, const SystemConfig &cfg,
                                      int chain = 0);

// Sum-rate optimal unconstrained precoding (one RF chain per antenna);
// upper-bounds every hybrid scheme on average.
SolverReport optimal_digital(const ChannelTensor &h, const Scenario &scn,
                             const SystemConfig &cfg);

// Penalty-FDA with every TTD frozen at zero delay, fully-connected.
SolverReport conventional_ps(const ChannelTensor &h, const Scenario &scn, const SystemConfig &cfg,
                             const fda::FdaOptions &opt = {});

// Architecture a scheme actually runs on (the FDA variants pin theirs).
SystemConfig effective_config(const SystemConfig &cfg, SchemeId scheme);

// Runs any scheme end to end on one channel realization.
SolverReport run_scheme(const ChannelTensor &h, const Scenario &scn, const SystemConfig &cfg,
                        SchemeId scheme, const fda::FdaOptions &opt = {});

} // namespace baselines
} // namespace nfbeam

#endif

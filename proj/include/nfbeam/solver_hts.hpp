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

#ifndef NFBEAM_SOLVER_HTS_HPP
#define NFBEAM_SOLVER_HTS_HPP

#include "solver_fda.hpp"

namespace nfbeam {
namespace hts {

enum class AnalogDesignMode { PNF, Robust };

// Geometry of one RF chain's TTD sub-arrays relative to a design point
// (theta, r): group centers, their ranges/angles, and per-element ranges.
struct PnfGeometry {
    VectorXd xi;       // group centers, units of antenna spacing
    VectorXd nu;       // ranges from the design point to the group centers, m
    VectorXd vartheta; // angles at the group centers, rad
    MatrixXd nu_tilde; // N_T x group_len exact per-element ranges, m
    double nu_max = 0.0;
    double range = 0.0; // r of the design point
};

// Sub-array geometry for TTD group l of the given chain (chain 0 of a
// fully-connected layout reproduces the whole-array decomposition).
PnfGeometry pnf_geometry(double theta, double r, const SystemConfig &cfg, int chain = 0);

// Piecewise-near-field approximation of the whole-array response: per-group
// phase profiles frozen at f_c, inter-group delay carried at f.
VectorXcd pnf_approx_response(double f, double theta, double r, const SystemConfig &cfg);

// Worst-case normalized gain of the PNF approximation as a function of
// N_T/N and B/f_c (Dirichlet-kernel form).
double delta_criterion(double nt_ratio, double bw_ratio);

// Smallest N_T in 1..N whose delta_criterion meets the threshold; -1 if none.
int smallest_nt_for_delta(int n_antennas, double bw_ratio, double threshold);

// Exact response of the antennas driven by one chain (length chain_span).
VectorXcd chain_response(double f, double theta, double r, const SystemConfig &cfg, int chain = 0);

// One chain's analog coefficients.
struct AnalogChainDesign {
    VectorXd phases; // chain_span entries, radians
    VectorXd delays; // N_T entries, seconds
    int target_user = -1;
    AnalogDesignMode mode = AnalogDesignMode::PNF;
};

// Frequency response of a chain design (length chain_span).
VectorXcd chain_vector(const AnalogChainDesign &dsg, double f, const SystemConfig &cfg);

// Conjugate phase match against the PNF per-group profiles.
VectorXd pnf_ps_design(double theta, double r, const SystemConfig &cfg, int chain = 0);

// Delay-alignment objective: sum_m |sum_l exp(-j 2 pi f_m ((nu_l - r)/c + t_l))|.
double pnf_delay_objective(const PnfGeometry &geom, const VectorXd &delays,
                           const SystemConfig &cfg);

// Worst-case delay span of the fully-connected layout; the closed form below
// is always feasible once t_max reaches this bound.
double prop2_delay_bound(const SystemConfig &cfg);

// Closed-form delays t_l = (nu_max - nu_l)/c; falls back to the cyclic grid
// search when t_max is below the design's delay span.
VectorXd pnf_ttd_closed_form(const PnfGeometry &geom, const SystemConfig &cfg);

// Cyclic per-delay grid search of the alignment objective; the optional trace
// records the objective after every sweep.
VectorXd pnf_ttd_search(const PnfGeometry &geom, const SystemConfig &cfg, int grid_points = 0,
                        std::vector<double> *trace = nullptr);

// Majorization-minimization phase design against the exact chain response at
// fixed delays. Returns the phase vector; optionally records the objective
// trace (one entry per MM step, non-decreasing).
VectorXd robust_mm_ps(double theta, double r, const VectorXd &delays, const SystemConfig &cfg,
                      const VectorXd &init_phases, int chain = 0,
                      std::vector<double> *trace = nullptr);

// Exact average array gain of a chain design over the band, 1.0 = perfect.
double exact_avg_gain(double theta, double r, const AnalogChainDesign &dsg,
                      const SystemConfig &cfg, int chain = 0);

// PNF design for one chain: matched per-group phases + alignment delays.
AnalogChainDesign pnf_chain_design(double theta, double r, const SystemConfig &cfg, int chain = 0);

// Alternating MM/grid-search design against the exact response, initialized
// from the PNF design.
AnalogChainDesign robust_analog_design(double theta, double r, const SystemConfig &cfg,
                                       int chain = 0, std::vector<double> *trace = nullptr);

// Equivalent channel T_m^H A^H h_{m,k} seen by the digital precoder.
VectorXcd equivalent_channel(const ChannelTensor &h, const PhaseNetwork &ps,
                             const DelayNetwork &delays, int m, int k, const SystemConfig &cfg);

// Sum-rate optimal digital stage on the equivalent channels, scaled to meet
// the per-subcarrier power budget with equality.
DigitalPrecoder digital_stage(const ChannelTensor &h, const PhaseNetwork &ps,
                              const DelayNetwork &delays, const VectorXd &noise,
                              const SystemConfig &cfg, fda::FpResult *fp_info = nullptr);

// Two-stage solver: per-chain analog designs from the LoS geometry, then the
// digital stage. Chains beyond the first K target a seeded random user.
SolverReport hts_solve(const ChannelTensor &h, const Scenario &scn, const SystemConfig &cfg,
                       AnalogDesignMode mode);

} // namespace hts
} // namespace nfbeam

#endif

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

#ifndef NFBEAM_SOLVER_FDA_HPP
#define NFBEAM_SOLVER_FDA_HPP

#include "metrics.hpp"

#include <optional>
#include <vector>

namespace nfbeam {

using MatStack = std::vector<MatrixXcd>; // one matrix per subcarrier

struct SolverReport {
    std::vector<double> objective_trace; // objective after each BCD sweep
    std::vector<int> phase_index;        // penalty phase of each trace entry
    std::vector<double> rho_trace;       // penalty factor per phase
    std::vector<double> penalty_trace;   // relative residual per phase
    int outer_iters = 0;
    int inner_iters = 0;
    bool converged = false;
    bool ridge_used = false;
    double spectral_efficiency = 0.0;
    double wall_time_s = 0.0;
    std::optional<HybridBeamformer> hybrid;
    std::optional<FullyDigitalPrecoder> digital;
};

namespace fda {

struct FdaOptions {
    double rho0 = 1e3;          // initial penalty factor (digital fit)
    double rho_bar0 = 1e3;      // initial penalty factor (analog fit)
    double reduction = 0.5;     // penalty shrink factor c
    int grid_points = 1000;     // Q samples of the delay search set
    double inner_tol = 1e-3;    // fractional objective change threshold
    double penalty_tol = 1e-3;  // relative Frobenius residual threshold
    int max_inner = 50;         // BCD sweeps per penalty phase
    int max_outer = 60;         // penalty phases of the outer solver
    int max_fit_inner = 50;     // BCD cycles per phase of the analog fit
    int max_fit_outer = 500;    // penalty phases of the analog fit
    bool freeze_delays = false; // keep all TTD delays at their initial value
};

// Precomputed search set Q = {0, t_max/(Q-1), ..., t_max} together with the
// per-subcarrier phasors exp(-j 2 pi f_m t_q).
struct DelayGrid {
    VectorXd points;   // Q
    MatrixXcd phasors; // Q x M
    static DelayGrid build(const SystemConfig &cfg, int grid_points);
};

// ---- block updates (each is the exact optimizer of its subproblem) ----

// Optimal PS phases given the analog targets V_m, fully-connected. Groups
// whose accumulator vanishes keep their previous phase.
PhaseNetwork update_ps_full(const MatStack &V, const DelayNetwork &delays, const PhaseNetwork &prev,
                            const SystemConfig &cfg);

// Per-delay one-dimensional grid search against the analog targets V_m,
// fully-connected. Ties resolve to the smallest grid point.
DelayNetwork update_ttd_full(const MatStack &V, const PhaseNetwork &ps, const SystemConfig &cfg,
                             int grid_points);

// Closed-form update of the auxiliary analog targets V_m.
MatStack update_v(const MatStack &W, const DigitalPrecoder &D, const PhaseNetwork &ps,
                  const DelayNetwork &delays, double rho_bar, const SystemConfig &cfg);

// Least-squares digital precoder D_m = (T^H A^H A T)^{-1} T^H A^H W_m. A
// rank-deficient Gram matrix falls back to a 1e-12 ridge and sets *ridge_used.
DigitalPrecoder update_digital(const MatStack &W, const PhaseNetwork &ps,
                               const DelayNetwork &delays, const SystemConfig &cfg,
                               bool *ridge_used = nullptr);

// Lagrangian-dual multipliers mu_{m,k} = power-normalized SINR of W_m.
MatrixXd update_mu(const MatStack &H, const MatStack &W, const VectorXd &noise, double tx_power);

// Quadratic-transform multipliers lambda_{m,k}.
MatrixXcd update_lambda(const MatStack &H, const MatStack &W, const MatrixXd &mu,
                        const VectorXd &noise, double tx_power);

// First-order optimal fully-digital precoders under the proximity penalty.
MatStack update_w(const MatStack &H, const MatStack &ATD, const MatrixXd &mu, const MatrixXcd &lam,
                  const VectorXd &noise, double tx_power, double rho);

// Sub-connected PS and TTD updates, driven directly by (W, D).
PhaseNetwork update_ps_sub(const MatStack &W, const DigitalPrecoder &D, const DelayNetwork &delays,
                           const PhaseNetwork &prev, const SystemConfig &cfg);
DelayNetwork update_ttd_sub(const MatStack &W, const DigitalPrecoder &D, const PhaseNetwork &ps,
                            const SystemConfig &cfg, int grid_points);

// ---- objectives ----

// Analog-fit objective: sum_m ||W_m - V_m D_m||_F^2 + (1/rho_bar) ||V_m - A T_m||_F^2.
double fit_objective(const MatStack &W, const MatStack &V, const DigitalPrecoder &D,
                     const PhaseNetwork &ps, const DelayNetwork &delays, double rho_bar,
                     const SystemConfig &cfg);

// Penalized spectral-efficiency objective:
// sum_{m,k} log2(1 + mod-SINR(W_m)) - (1/rho) sum_m ||W_m - A T_m D_m||_F^2.
double problem_objective(const MatStack &H, const MatStack &W, const PhaseNetwork &ps,
                         const DelayNetwork &delays, const DigitalPrecoder &D,
                         const VectorXd &noise, double tx_power, double rho,
                         const SystemConfig &cfg);

double penalty_sum(const MatStack &W, const PhaseNetwork &ps, const DelayNetwork &delays,
                   const DigitalPrecoder &D, const SystemConfig &cfg);

// ---- solver loops ----

struct FitResult {
    PhaseNetwork ps;
    DelayNetwork delays;
    MatStack V;
    std::vector<double> objective_trace; // per BCD cycle
    std::vector<int> phase_index;
    double residual = 0.0;
    int cycles = 0;
    int phases = 0;
    bool converged = false;
};

// Nested penalty loop fitting A T_m to the targets implied by (W, D),
// fully-connected architectures.
FitResult inner_penalty_loop(const MatStack &W, const DigitalPrecoder &D, const PhaseNetwork &ps0,
                             const DelayNetwork &delays0, const MatStack &V0,
                             const SystemConfig &cfg, const FdaOptions &opt);

// Penalty-driven fully-digital-approximation solver. Dispatches on the
// configured architecture and ends with the exact power rescale.
SolverReport solve_fda(const ChannelTensor &h, const VectorXd &noise, const SystemConfig &cfg,
                       const HybridBeamformer &init, const FdaOptions &opt = {});

// ---- shared fractional-programming machinery ----

struct FpResult {
    MatStack W;
    std::vector<double> objective_trace;
    int iters = 0;
    bool converged = false;
};

// Maximizes sum_{m,k} log2(1 + mod-SINR) over unconstrained per-subcarrier
// precoders of any row dimension. Starts from matched filtering unless an
// initial stack is supplied.
FpResult fp_digital_solve(const MatStack &H, const VectorXd &noise, double tx_power,
                          double tol = 1e-3, int max_iters = 200,
                          const MatStack *W_init = nullptr);

// Flattens a solver trace to CSV rows "iteration,objective,penalty_residual,rho".
std::string trace_csv(const SolverReport &report);

} // namespace fda

} // namespace nfbeam

#endif

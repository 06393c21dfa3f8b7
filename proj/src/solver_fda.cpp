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

#include "nfbeam/solver_fda.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nfbeam {
namespace fda {

DelayGrid DelayGrid::build(const SystemConfig &cfg, int grid_points)
{
    DelayGrid g;
    const int Q = cfg.t_max > 0.0 ? std::max(grid_points, 2) : 1;
    g.points.resize(Q);
    for (int q = 0; q < Q; q++)
        g.points(q) = Q == 1 ? 0.0 : cfg.t_max * double(q) / double(Q - 1);
    const VectorXd f = cfg.subcarrier_freqs();
    g.phasors.resize(Q, f.size());
    for (int q = 0; q < Q; q++)
        for (Eigen::Index m = 0; m < f.size(); m++)
            g.phasors(q, m) = std::polar(1.0, -2.0 * pi * f(m) * g.points(q));
    return g;
}

// phases of acc, keeping prev where the accumulator vanishes
static VectorXd arg_or_prev(const VectorXcd &acc, const Eigen::VectorBlock<const VectorXd> prev)
{
    VectorXd out(acc.size());
    for (Eigen::Index i = 0; i < acc.size(); i++)
        out(i) = acc(i) == cxd(0.0, 0.0) ? prev(i) : std::arg(acc(i));
    return out;
}

PhaseNetwork update_ps_full(const MatStack &V, const DelayNetwork &delays, const PhaseNetwork &prev,
                            const SystemConfig &cfg)
{
    const VectorXd f = cfg.subcarrier_freqs();
    PhaseNetwork ps = prev;
    for (int n = 0; n < cfg.n_rf; n++)
        for (int l = 0; l < cfg.n_ttd; l++) {
            VectorXcd acc = VectorXcd::Zero(cfg.group_len());
            for (Eigen::Index m = 0; m < f.size(); m++) {
                const cxd ph = std::polar(1.0, 2.0 * pi * f(m) * delays.t(n, l));
                acc += ph * V[size_t(m)].col(n).segment(cfg.group_offset(n, l), cfg.group_len());
            }
            ps.group(n, l, cfg) = arg_or_prev(acc, prev.group(n, l, cfg));
        }
    return ps;
}

// Coefficients c_m = v_{m}^H a for one (chain, ttd) pair; the delay score is
// sum_m Re{c_m e^{-j 2 pi f_m t}}.
static VectorXcd delay_coefficients_full(const MatStack &V, const PhaseNetwork &ps, int n, int l,
                                         const SystemConfig &cfg)
{
    const VectorXcd a = ps.group_vector(n, l, cfg);
    VectorXcd c(Eigen::Index(V.size()));
    for (size_t m = 0; m < V.size(); m++)
        c(Eigen::Index(m)) =
            V[m].col(n).segment(cfg.group_offset(n, l), cfg.group_len()).dot(a); // v^H a
    return c;
}

static double delay_score(const VectorXcd &c, const VectorXd &freqs, double t)
{
    double s = 0.0;
    for (Eigen::Index m = 0; m < freqs.size(); m++)
        s += (c(m) * std::polar(1.0, -2.0 * pi * freqs(m) * t)).real();
    return s;
}

// Grid argmax with first-index tie-breaking; with an incumbent, the incumbent
// wins unless a grid point is strictly better (keeps BCD sweeps monotone even
// when the current delay lies off the grid).
static double grid_argmax(const VectorXcd &c, const DelayGrid &grid, const VectorXd &freqs,
                          const double *incumbent)
{
    const VectorXcd s = grid.phasors * c;
    int best = 0;
    double best_score = s(0).real();
    for (Eigen::Index q = 1; q < s.size(); q++)
        if (s(q).real() > best_score) {
            best_score = s(q).real();
            best = int(q);
        }
    if (incumbent != nullptr && delay_score(c, freqs, *incumbent) > best_score)
        return *incumbent;
    return grid.points(best);
}

static DelayNetwork ttd_update_full_core(const MatStack &V, const PhaseNetwork &ps,
                                         const SystemConfig &cfg, const DelayGrid &grid,
                                         const DelayNetwork *incumbent)
{
    const VectorXd f = cfg.subcarrier_freqs();
    DelayNetwork out = DelayNetwork::zeros(cfg);
    for (int n = 0; n < cfg.n_rf; n++)
        for (int l = 0; l < cfg.n_ttd; l++) {
            const VectorXcd c = delay_coefficients_full(V, ps, n, l, cfg);
            const double *inc = incumbent != nullptr ? &incumbent->t(n, l) : nullptr;
            out.t(n, l) = grid_argmax(c, grid, f, inc);
        }
    return out;
}

DelayNetwork update_ttd_full(const MatStack &V, const PhaseNetwork &ps, const SystemConfig &cfg,
                             int grid_points)
{
    return ttd_update_full_core(V, ps, cfg, DelayGrid::build(cfg, grid_points), nullptr);
}

MatStack update_v(const MatStack &W, const DigitalPrecoder &D, const PhaseNetwork &ps,
                  const DelayNetwork &delays, double rho_bar, const SystemConfig &cfg)
{
    if (!(rho_bar > 0.0))
        throw std::invalid_argument("rho_bar must be positive");
    const VectorXd f = cfg.subcarrier_freqs();
    MatStack V(W.size());
    const double inv = 1.0 / rho_bar;
    for (size_t m = 0; m < W.size(); m++) {
        const MatrixXcd AT = assemble_analog(ps, delays, f(Eigen::Index(m)), cfg);
        const MatrixXcd &Dm = D[int(m)];
        MatrixXcd G = Dm * Dm.adjoint();
        G.diagonal().array() += inv;
        const MatrixXcd rhs = W[m] * Dm.adjoint() + inv * AT;
        // V = rhs G^{-1}; G is Hermitian positive definite
        V[m] = G.llt().solve(rhs.adjoint()).adjoint();
    }
    return V;
}

DigitalPrecoder update_digital(const MatStack &W, const PhaseNetwork &ps,
                               const DelayNetwork &delays, const SystemConfig &cfg,
                               bool *ridge_used)
{
    const VectorXd f = cfg.subcarrier_freqs();
    DigitalPrecoder D;
    D.d.resize(W.size());
    for (size_t m = 0; m < W.size(); m++) {
        const MatrixXcd AT = assemble_analog(ps, delays, f(Eigen::Index(m)), cfg);
        MatrixXcd G = AT.adjoint() * AT;
        const MatrixXcd rhs = AT.adjoint() * W[m];
        Eigen::LDLT<MatrixXcd> ldlt(G);
        MatrixXcd sol;
        if (ldlt.info() == Eigen::Success) {
            sol = ldlt.solve(rhs);
            if ((G * sol - rhs).norm() > 1e-6 * std::max(1.0, rhs.norm()))
                sol.resize(0, 0);
        }
        if (sol.size() == 0 || !sol.allFinite()) {
            G.diagonal().array() += 1e-12 * std::max(1.0, G.real().trace());
            sol = G.ldlt().solve(rhs);
            if (ridge_used != nullptr)
                *ridge_used = true;
        }
        D.d[m] = std::move(sol);
    }
    return D;
}

MatrixXd update_mu(const MatStack &H, const MatStack &W, const VectorXd &noise, double tx_power)
{
    const int K = int(H.front().cols());
    MatrixXd mu(Eigen::Index(H.size()), K);
    for (size_t m = 0; m < H.size(); m++)
        for (int k = 1; k <= K; k++)
            mu(Eigen::Index(m), k - 1) = modified_sinr_hat(H[m], W[m], k, noise(k - 1), tx_power);
    return mu;
}

MatrixXcd update_lambda(const MatStack &H, const MatStack &W, const MatrixXd &mu,
                        const VectorXd &noise, double tx_power)
{
    const int K = int(H.front().cols());
    MatrixXcd lam = MatrixXcd::Zero(Eigen::Index(H.size()), K);
    for (size_t m = 0; m < H.size(); m++) {
        const double wnorm2 = W[m].squaredNorm();
        if (wnorm2 <= 0.0)
            continue; // lambda stays zero for a vanished precoder
        for (int k = 0; k < K; k++) {
            const VectorXcd g = W[m].adjoint() * H[m].col(k); // g(i) = (h_k^H w_i)^*
            const double denom = g.squaredNorm() + noise(k) / tx_power * wnorm2;
            lam(Eigen::Index(m), k) =
                std::sqrt(1.0 + mu(Eigen::Index(m), k)) * std::conj(g(k)) / denom;
        }
    }
    return lam;
}

// Shared normal-equation step for the precoder block; inv_rho = 0 drops the
// proximity term (plain fractional-programming update).
static MatStack w_step(const MatStack &H, const MatStack *ATD, const MatrixXd &mu,
                       const MatrixXcd &lam, const VectorXd &noise, double tx_power,
                       double inv_rho)
{
    const Eigen::Index dim = H.front().rows();
    const int K = int(H.front().cols());
    MatStack W(H.size());
    for (size_t m = 0; m < H.size(); m++) {
        MatrixXcd A = MatrixXcd::Zero(dim, dim);
        double diag = inv_rho;
        MatrixXcd B = MatrixXcd::Zero(dim, K);
        if (ATD != nullptr)
            B = inv_rho * (*ATD)[m];
        for (int k = 0; k < K; k++) {
            const cxd l = lam(Eigen::Index(m), k);
            const double l2 = std::norm(l);
            if (l2 > 0.0) {
                A.noalias() += l2 * (H[m].col(k) * H[m].col(k).adjoint());
                diag += l2 * noise(k) / tx_power;
            }
            // stationarity of the transformed objective pairs the channel with
            // the unconjugated multiplier
            B.col(k) += std::sqrt(1.0 + mu(Eigen::Index(m), k)) * l * H[m].col(k);
        }
        A.diagonal().array() += diag;
        W[m] = A.llt().solve(B);
    }
    return W;
}

MatStack update_w(const MatStack &H, const MatStack &ATD, const MatrixXd &mu, const MatrixXcd &lam,
                  const VectorXd &noise, double tx_power, double rho)
{
    if (!(rho > 0.0))
        throw std::invalid_argument("rho must be positive");
    return w_step(H, &ATD, mu, lam, noise, tx_power, 1.0 / rho);
}

// Phi_{m,n,l} = (W_m sub-block for chain n) * D_m^H(:, n), restricted to the
// rows of TTD group l.
static VectorXcd phi_vector(const MatStack &W, const DigitalPrecoder &D, int m, int n, int l,
                            const SystemConfig &cfg)
{
    const VectorXcd p = D[m].row(n).adjoint(); // D^H(:, n)
    return W[size_t(m)].block(cfg.group_offset(n, l), 0, cfg.group_len(), p.size()) * p;
}

PhaseNetwork update_ps_sub(const MatStack &W, const DigitalPrecoder &D, const DelayNetwork &delays,
                           const PhaseNetwork &prev, const SystemConfig &cfg)
{
    const VectorXd f = cfg.subcarrier_freqs();
    PhaseNetwork ps = prev;
    for (int n = 0; n < cfg.n_rf; n++)
        for (int l = 0; l < cfg.n_ttd; l++) {
            VectorXcd acc = VectorXcd::Zero(cfg.group_len());
            for (Eigen::Index m = 0; m < f.size(); m++)
                acc += std::polar(1.0, 2.0 * pi * f(m) * delays.t(n, l)) *
                       phi_vector(W, D, int(m), n, l, cfg);
            ps.group(n, l, cfg) = arg_or_prev(acc, prev.group(n, l, cfg));
        }
    return ps;
}

static DelayNetwork ttd_update_sub_core(const MatStack &W, const DigitalPrecoder &D,
                                        const PhaseNetwork &ps, const SystemConfig &cfg,
                                        const DelayGrid &grid, const DelayNetwork *incumbent)
{
    const VectorXd f = cfg.subcarrier_freqs();
    DelayNetwork out = DelayNetwork::zeros(cfg);
    for (int n = 0; n < cfg.n_rf; n++)
        for (int l = 0; l < cfg.n_ttd; l++) {
            const VectorXcd a = ps.group_vector(n, l, cfg);
            VectorXcd c(f.size());
            for (Eigen::Index m = 0; m < f.size(); m++)
                c(m) = phi_vector(W, D, int(m), n, l, cfg).dot(a); // phi^H a
            const double *inc = incumbent != nullptr ? &incumbent->t(n, l) : nullptr;
            out.t(n, l) = grid_argmax(c, grid, f, inc);
        }
    return out;
}

DelayNetwork update_ttd_sub(const MatStack &W, const DigitalPrecoder &D, const PhaseNetwork &ps,
                            const SystemConfig &cfg, int grid_points)
{
    return ttd_update_sub_core(W, D, ps, cfg, DelayGrid::build(cfg, grid_points), nullptr);
}

double fit_objective(const MatStack &W, const MatStack &V, const DigitalPrecoder &D,
                     const PhaseNetwork &ps, const DelayNetwork &delays, double rho_bar,
                     const SystemConfig &cfg)
{
    const VectorXd f = cfg.subcarrier_freqs();
    double obj = 0.0;
    for (size_t m = 0; m < W.size(); m++) {
        obj += (W[m] - V[m] * D[int(m)]).squaredNorm();
        obj += (V[m] - assemble_analog(ps, delays, f(Eigen::Index(m)), cfg)).squaredNorm() /
               rho_bar;
    }
    return obj;
}

double penalty_sum(const MatStack &W, const PhaseNetwork &ps, const DelayNetwork &delays,
                   const DigitalPrecoder &D, const SystemConfig &cfg)
{
    const VectorXd f = cfg.subcarrier_freqs();
    double s = 0.0;
    for (size_t m = 0; m < W.size(); m++)
        s += (W[m] - assemble_analog(ps, delays, f(Eigen::Index(m)), cfg) * D[int(m)])
                 .squaredNorm();
    return s;
}

double problem_objective(const MatStack &H, const MatStack &W, const PhaseNetwork &ps,
                         const DelayNetwork &delays, const DigitalPrecoder &D,
                         const VectorXd &noise, double tx_power, double rho,
                         const SystemConfig &cfg)
{
    double obj = 0.0;
    for (size_t m = 0; m < H.size(); m++)
        for (int k = 1; k <= int(H.front().cols()); k++)
            obj += std::log2(1.0 + modified_sinr_hat(H[m], W[m], k, noise(k - 1), tx_power));
    return obj - penalty_sum(W, ps, delays, D, cfg) / rho;
}

FitResult inner_penalty_loop(const MatStack &W, const DigitalPrecoder &D, const PhaseNetwork &ps0,
                             const DelayNetwork &delays0, const MatStack &V0,
                             const SystemConfig &cfg, const FdaOptions &opt)
{
    FitResult r;
    r.ps = ps0;
    r.delays = delays0;
    r.V = V0;
    const DelayGrid grid = DelayGrid::build(cfg, opt.grid_points);
    const VectorXd f = cfg.subcarrier_freqs();
    double rho_bar = opt.rho_bar0;

    for (int phase = 0; phase < opt.max_fit_outer; phase++) {
        double prev = fit_objective(W, r.V, D, r.ps, r.delays, rho_bar, cfg);
        for (int cycle = 0; cycle < opt.max_fit_inner; cycle++) {
            r.ps = update_ps_full(r.V, r.delays, r.ps, cfg);
            if (!opt.freeze_delays)
                r.delays = ttd_update_full_core(r.V, r.ps, cfg, grid, &r.delays);
            r.V = update_v(W, D, r.ps, r.delays, rho_bar, cfg);
            const double obj = fit_objective(W, r.V, D, r.ps, r.delays, rho_bar, cfg);
            r.objective_trace.push_back(obj);
            r.phase_index.push_back(phase);
            r.cycles++;
            if (prev - obj <= opt.inner_tol * std::max(std::abs(prev), 1e-12))
                break;
            prev = obj;
        }
        r.phases++;
        double residual = 0.0;
        for (size_t m = 0; m < r.V.size(); m++) {
            const double vn = r.V[m].norm();
            const double e =
                (r.V[m] - assemble_analog(r.ps, r.delays, f(Eigen::Index(m)), cfg)).norm();
            residual = std::max(residual, e / std::max(vn, 1e-300));
        }
        r.residual = residual;
        if (residual < opt.penalty_tol) {
            r.converged = true;
            break;
        }
        rho_bar *= opt.reduction;
    }
    return r;
}

static MatStack effective_stack(const PhaseNetwork &ps, const DelayNetwork &delays,
                                const DigitalPrecoder &D, const SystemConfig &cfg)
{
    const VectorXd f = cfg.subcarrier_freqs();
    MatStack ATD(size_t(f.size()));
    for (Eigen::Index m = 0; m < f.size(); m++)
        ATD[size_t(m)] = assemble_analog(ps, delays, f(m), cfg) * D[int(m)];
    return ATD;
}

SolverReport solve_fda(const ChannelTensor &h, const VectorXd &noise, const SystemConfig &cfg,
                       const HybridBeamformer &init, const FdaOptions &opt)
{
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    const bool full = cfg.architecture == Architecture::FullyConnected;
    const DelayGrid grid = DelayGrid::build(cfg, opt.grid_points);

    SolverReport rep;
    PhaseNetwork ps = init.ps;
    DelayNetwork delays = init.delays;
    DigitalPrecoder D = init.digital;
    MatStack W = effective_stack(ps, delays, D, cfg);
    MatStack V;
    if (full) {
        const VectorXd f = cfg.subcarrier_freqs();
        V.resize(W.size());
        for (size_t m = 0; m < W.size(); m++)
            V[m] = assemble_analog(ps, delays, f(Eigen::Index(m)), cfg);
    }

    double rho = opt.rho0;
    for (int phase = 0; phase < opt.max_outer; phase++) {
        // the power-normalized SINR is invariant under a joint rescale of
        // (W, D), so pin the free overall scale to the power budget at every
        // phase boundary; otherwise block sweeps can shrink both factors
        // geometrically and the relative residual never closes
        for (size_t m = 0; m < W.size(); m++) {
            const double wn = W[m].norm();
            if (wn > 0.0) {
                const double s = std::sqrt(cfg.tx_power) / wn;
                W[m] *= s;
                D[int(m)] *= s;
            }
        }
        double prev = problem_objective(h.h, W, ps, delays, D, noise, cfg.tx_power, rho, cfg);
        for (int sweep = 0; sweep < opt.max_inner; sweep++) {
            if (full) {
                // analog blocks through the nested fit; accept only if the
                // proximity penalty did not regress
                const double p0 = penalty_sum(W, ps, delays, D, cfg);
                FitResult fit = inner_penalty_loop(W, D, ps, delays, V, cfg, opt);
                if (penalty_sum(W, fit.ps, fit.delays, D, cfg) <= p0 * (1.0 + 1e-12) + 1e-300) {
                    ps = std::move(fit.ps);
                    delays = std::move(fit.delays);
                    V = std::move(fit.V);
                }
            } else {
                ps = update_ps_sub(W, D, delays, ps, cfg);
                if (!opt.freeze_delays)
                    delays = ttd_update_sub_core(W, D, ps, cfg, grid, &delays);
            }
            D = update_digital(W, ps, delays, cfg, &rep.ridge_used);
            const MatrixXd mu = update_mu(h.h, W, noise, cfg.tx_power);
            const MatrixXcd lam = update_lambda(h.h, W, mu, noise, cfg.tx_power);
            // the rate terms are log2 while the transform is tight in natural
            // units; exact ascent of the penalized log2 objective needs the
            // proximity weight scaled by ln 2 inside the precoder step
            W = update_w(h.h, effective_stack(ps, delays, D, cfg), mu, lam, noise, cfg.tx_power,
                         rho / std::log(2.0));

            const double obj =
                problem_objective(h.h, W, ps, delays, D, noise, cfg.tx_power, rho, cfg);
            rep.objective_trace.push_back(obj);
            rep.phase_index.push_back(phase);
            rep.inner_iters++;
            if (obj - prev <= opt.inner_tol * std::max(std::abs(prev), 1e-12))
                break;
            prev = obj;
        }
        rep.outer_iters++;
        double residual = 0.0;
        const MatStack ATD = effective_stack(ps, delays, D, cfg);
        for (size_t m = 0; m < W.size(); m++)
            residual = std::max(residual,
                                (W[m] - ATD[m]).norm() / std::max(W[m].norm(), 1e-300));
        rep.rho_trace.push_back(rho);
        rep.penalty_trace.push_back(residual);
        if (residual < opt.penalty_tol) {
            rep.converged = true;
            break;
        }
        rho *= opt.reduction;
    }

    HybridBeamformer hb;
    hb.architecture = cfg.architecture;
    hb.ps = std::move(ps);
    hb.delays = std::move(delays);
    hb.digital = std::move(D);
    hb = power_rescale(hb, cfg);
    rep.spectral_efficiency = spectral_efficiency(h, hb, noise, cfg);
    rep.hybrid = std::move(hb);
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string trace_csv(const SolverReport &report)
{
    std::ostringstream os;
    os << "iteration,objective,penalty_residual,rho\n";
    for (size_t i = 0; i < report.objective_trace.size(); i++) {
        const size_t phase = i < report.phase_index.size() ? size_t(report.phase_index[i]) : 0;
        const double residual =
            phase < report.penalty_trace.size() ? report.penalty_trace[phase] : 0.0;
        const double rho = phase < report.rho_trace.size() ? report.rho_trace[phase] : 0.0;
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i + 1,
                      report.objective_trace[i], residual, rho);
        os << buf;
    }
    return os.str();
}

FpResult fp_digital_solve(const MatStack &H, const VectorXd &noise, double tx_power, double tol,
                          int max_iters, const MatStack *W_init)
{
    const Eigen::Index dim = H.front().rows();
    const int K = int(H.front().cols());
    FpResult r;
    if (W_init != nullptr) {
        r.W = *W_init;
    } else {
        // matched-filter start with equal per-user power split
        r.W.resize(H.size());
        for (size_t m = 0; m < H.size(); m++) {
            MatrixXcd W0(dim, K);
            for (int k = 0; k < K; k++) {
                const double hn = H[m].col(k).norm();
                W0.col(k) = hn > 0.0
                                ? VectorXcd(H[m].col(k) * (std::sqrt(tx_power / K) / hn))
                                : VectorXcd(VectorXcd::Zero(dim));
            }
            r.W[m] = std::move(W0);
        }
    }

    auto objective = [&]() {
        double obj = 0.0;
        for (size_t m = 0; m < H.size(); m++)
            for (int k = 1; k <= K; k++)
                obj += std::log2(1.0 + modified_sinr_hat(H[m], r.W[m], k, noise(k - 1), tx_power));
        return obj;
    };

    double prev = objective();
    r.objective_trace.push_back(prev);
    for (int it = 0; it < max_iters; it++) {
        const MatrixXd mu = update_mu(H, r.W, noise, tx_power);
        const MatrixXcd lam = update_lambda(H, r.W, mu, noise, tx_power);
        r.W = w_step(H, nullptr, mu, lam, noise, tx_power, 0.0);
        const double obj = objective();
        r.objective_trace.push_back(obj);
        r.iters++;
        if (obj - prev <= tol * std::max(std::abs(prev), 1e-12)) {
            r.converged = true;
            break;
        }
        prev = obj;
    }
    return r;
}

} // namespace fda
} // namespace nfbeam

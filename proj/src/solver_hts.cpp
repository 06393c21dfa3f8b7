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

#include "nfbeam/solver_hts.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace nfbeam {
namespace hts {

PnfGeometry pnf_geometry(double theta, double r, const SystemConfig &cfg, int chain)
{
    if (!(r > 0.0))
        throw std::invalid_argument("design range must be positive");
    const int nt = cfg.n_ttd;
    const int lg = cfg.group_len();
    const double d = cfg.spacing();
    PnfGeometry g;
    g.range = r;
    g.xi.resize(nt);
    g.nu.resize(nt);
    g.vartheta.resize(nt);
    g.nu_tilde.resize(nt, lg);
    const double ct = std::cos(theta);
    for (int l = 0; l < nt; l++) {
        const double xi = cfg.group_center(chain, l);
        g.xi(l) = xi;
        const double nu = std::sqrt(r * r + xi * xi * d * d - 2.0 * r * xi * d * ct);
        if (!(nu > 0.0))
            throw std::domain_error("design point coincides with a sub-array center");
        g.nu(l) = nu;
        double cosv = (r * ct - xi * d) / nu;
        cosv = std::clamp(cosv, -1.0, 1.0);
        g.vartheta(l) = std::acos(cosv);
        for (int q = 0; q < lg; q++) {
            const double chi = double(q) - 0.5 * (lg - 1);
            g.nu_tilde(l, q) =
                std::sqrt(nu * nu + chi * chi * d * d - 2.0 * nu * chi * d * cosv);
        }
    }
    g.nu_max = g.nu.maxCoeff();
    return g;
}

VectorXcd pnf_approx_response(double f, double theta, double r, const SystemConfig &cfg)
{
    const PnfGeometry g = pnf_geometry(theta, r, cfg, 0);
    const int lg = cfg.group_len();
    const double kc = 2.0 * pi * cfg.center_freq / speed_of_light;
    const double km = 2.0 * pi * f / speed_of_light;
    VectorXcd b(cfg.n_ttd * lg); // whole array when fully-connected, else chain 0
    for (int l = 0; l < cfg.n_ttd; l++) {
        const double inter = -km * (g.nu(l) - r);
        for (int q = 0; q < lg; q++)
            b(l * lg + q) = std::polar(1.0, inter - kc * (g.nu_tilde(l, q) - g.nu(l)));
    }
    return b;
}

double delta_criterion(double nt_ratio, double bw_ratio)
{
    if (!(nt_ratio > 0.0) || nt_ratio > 1.0)
        throw std::invalid_argument("nt_ratio must lie in (0, 1]");
    if (bw_ratio <= 0.0)
        return 1.0;
    const double den = std::sin(pi * bw_ratio / 4.0);
    if (std::abs(den) < 1e-300)
        return 1.0;
    return std::abs(nt_ratio * std::sin(pi * bw_ratio / (4.0 * nt_ratio)) / den);
}

int smallest_nt_for_delta(int n_antennas, double bw_ratio, double threshold)
{
    for (int nt = 1; nt <= n_antennas; nt++)
        if (delta_criterion(double(nt) / n_antennas, bw_ratio) >= threshold)
            return nt;
    return -1;
}

VectorXcd chain_response(double f, double theta, double r, const SystemConfig &cfg, int chain)
{
    const VectorXcd b = array_response(f, theta, r, cfg);
    return b.segment(cfg.group_offset(chain, 0), cfg.chain_span());
}

VectorXcd chain_vector(const AnalogChainDesign &dsg, double f, const SystemConfig &cfg)
{
    const int lg = cfg.group_len();
    VectorXcd v(cfg.chain_span());
    for (int l = 0; l < cfg.n_ttd; l++) {
        const double shift = -2.0 * pi * f * dsg.delays(l);
        for (int q = 0; q < lg; q++)
            v(l * lg + q) = std::polar(1.0, dsg.phases(l * lg + q) + shift);
    }
    return v;
}

VectorXd pnf_ps_design(double theta, double r, const SystemConfig &cfg, int chain)
{
    const PnfGeometry g = pnf_geometry(theta, r, cfg, chain);
    const int lg = cfg.group_len();
    const double kc = 2.0 * pi * cfg.center_freq / speed_of_light;
    VectorXd phases(cfg.chain_span());
    for (int l = 0; l < cfg.n_ttd; l++)
        for (int q = 0; q < lg; q++)
            phases(l * lg + q) = kc * (g.nu_tilde(l, q) - g.nu(l));
    return phases;
}

double pnf_delay_objective(const PnfGeometry &geom, const VectorXd &delays,
                           const SystemConfig &cfg)
{
    const VectorXd f = cfg.subcarrier_freqs();
    double obj = 0.0;
    for (Eigen::Index m = 0; m < f.size(); m++) {
        cxd s(0.0, 0.0);
        for (int l = 0; l < cfg.n_ttd; l++)
            s += std::polar(1.0, -2.0 * pi * f(m) *
                                     ((geom.nu(l) - geom.range) / speed_of_light + delays(l)));
        obj += std::abs(s);
    }
    return obj;
}

double prop2_delay_bound(const SystemConfig &cfg)
{
    return double(cfg.n_antennas) * (cfg.n_ttd - 1) * cfg.spacing() /
           (double(cfg.n_ttd) * speed_of_light);
}

VectorXd pnf_ttd_closed_form(const PnfGeometry &geom, const SystemConfig &cfg)
{
    const double span = (geom.xi.maxCoeff() - geom.xi.minCoeff()) * cfg.spacing() / speed_of_light;
    if (cfg.t_max < span)
        return pnf_ttd_search(geom, cfg);
    VectorXd t(cfg.n_ttd);
    for (int l = 0; l < cfg.n_ttd; l++)
        t(l) = (geom.nu_max - geom.nu(l)) / speed_of_light;
    return t;
}

// Cyclic one-dimensional search shared by the alignment and robust delay
// problems. coeff(m, l) multiplies exp(-j 2 pi f_m t_l); candidates are the
// grid points plus the incumbent delay.
static VectorXd cyclic_delay_search(const MatrixXcd &coeff, VectorXd t, const SystemConfig &cfg,
                                    int grid_points, int max_sweeps, double tol,
                                    std::vector<double> *trace = nullptr)
{
    const VectorXd f = cfg.subcarrier_freqs();
    const int M = int(f.size());
    const int nt = int(t.size());
    const int Q = cfg.t_max > 0.0 ? std::max(grid_points, 2) : 1;
    VectorXd grid(Q);
    for (int q = 0; q < Q; q++)
        grid(q) = Q == 1 ? 0.0 : cfg.t_max * double(q) / double(Q - 1);
    MatrixXcd phasors(Q, M);
    for (int q = 0; q < Q; q++)
        for (int m = 0; m < M; m++)
            phasors(q, m) = std::polar(1.0, -2.0 * pi * f(m) * grid(q));

    auto objective = [&](const VectorXd &tt) {
        double obj = 0.0;
        for (int m = 0; m < M; m++) {
            cxd s(0.0, 0.0);
            for (int l = 0; l < nt; l++)
                s += coeff(m, l) * std::polar(1.0, -2.0 * pi * f(m) * tt(l));
            obj += std::abs(s);
        }
        return obj;
    };

    double prev = objective(t);
    if (trace != nullptr)
        trace->push_back(prev);
    for (int sweep = 0; sweep < max_sweeps; sweep++) {
        for (int l = 0; l < nt; l++) {
            VectorXcd rest = VectorXcd::Zero(M); // contribution of the other delays
            for (int m = 0; m < M; m++)
                for (int j = 0; j < nt; j++)
                    if (j != l)
                        rest(m) += coeff(m, j) * std::polar(1.0, -2.0 * pi * f(m) * t(j));
            double best = 0.0;
            int best_q = -1;
            for (int q = 0; q < Q; q++) {
                double s = 0.0;
                for (int m = 0; m < M; m++)
                    s += std::abs(rest(m) + coeff(m, l) * phasors(q, m));
                if (best_q < 0 || s > best) {
                    best = s;
                    best_q = q;
                }
            }
            double inc = 0.0;
            for (int m = 0; m < M; m++)
                inc += std::abs(rest(m) + coeff(m, l) * std::polar(1.0, -2.0 * pi * f(m) * t(l)));
            if (best > inc)
                t(l) = grid(best_q);
        }
        const double obj = objective(t);
        if (trace != nullptr)
            trace->push_back(obj);
        if (obj - prev <= tol * std::max(prev, 1e-12))
            break;
        prev = obj;
    }
    return t;
}

VectorXd pnf_ttd_search(const PnfGeometry &geom, const SystemConfig &cfg, int grid_points,
                        std::vector<double> *trace)
{
    const VectorXd f = cfg.subcarrier_freqs();
    MatrixXcd coeff(f.size(), cfg.n_ttd);
    for (Eigen::Index m = 0; m < f.size(); m++)
        for (int l = 0; l < cfg.n_ttd; l++)
            coeff(m, l) = std::polar(1.0, -2.0 * pi * f(m) * (geom.nu(l) - geom.range) /
                                              speed_of_light);
    const int Q = grid_points > 0 ? grid_points : 1000;
    return cyclic_delay_search(coeff, VectorXd::Zero(cfg.n_ttd), cfg, Q, 50, 1e-3, trace);
}

AnalogChainDesign pnf_chain_design(double theta, double r, const SystemConfig &cfg, int chain)
{
    AnalogChainDesign dsg;
    dsg.mode = AnalogDesignMode::PNF;
    dsg.phases = pnf_ps_design(theta, r, cfg, chain);
    dsg.delays = pnf_ttd_closed_form(pnf_geometry(theta, r, cfg, chain), cfg);
    return dsg;
}

// eta_m vectors of the phase-alignment problem: conj(chain response) with the
// delay phases folded in.
static MatrixXcd eta_matrix(double theta, double r, const VectorXd &delays,
                            const SystemConfig &cfg, int chain)
{
    const VectorXd f = cfg.subcarrier_freqs();
    const int span = cfg.chain_span();
    const int lg = cfg.group_len();
    MatrixXcd eta(span, f.size());
    for (Eigen::Index m = 0; m < f.size(); m++) {
        const VectorXcd b = chain_response(f(m), theta, r, cfg, chain);
        for (int l = 0; l < cfg.n_ttd; l++) {
            const cxd ph = std::polar(1.0, 2.0 * pi * f(m) * delays(l));
            for (int q = 0; q < lg; q++)
                eta(l * lg + q, m) = std::conj(b(l * lg + q)) * ph;
        }
    }
    return eta;
}

VectorXd robust_mm_ps(double theta, double r, const VectorXd &delays, const SystemConfig &cfg,
                      const VectorXd &init_phases, int chain, std::vector<double> *trace)
{
    const MatrixXcd eta = eta_matrix(theta, r, delays, cfg, chain);
    const int M = int(eta.cols());
    VectorXcd a(eta.rows());
    for (Eigen::Index i = 0; i < a.size(); i++)
        a(i) = std::polar(1.0, init_phases(i));

    auto objective = [&](const VectorXcd &v) {
        double obj = 0.0;
        for (int m = 0; m < M; m++)
            obj += std::abs(eta.col(m).dot(v)); // |eta^H a|
        return obj;
    };

    double prev = objective(a);
    if (trace != nullptr)
        trace->push_back(prev);
    for (int it = 0; it < 100; it++) {
        VectorXcd q = VectorXcd::Zero(a.size());
        for (int m = 0; m < M; m++) {
            const cxd u = eta.col(m).dot(a);
            const double mag = std::abs(u);
            if (mag > 0.0)
                q += eta.col(m) * (u / mag);
        }
        for (Eigen::Index i = 0; i < a.size(); i++)
            a(i) = q(i) == cxd(0.0, 0.0) ? a(i) : cxd(std::polar(1.0, std::arg(q(i))));
        const double obj = objective(a);
        if (trace != nullptr)
            trace->push_back(obj);
        if (obj - prev <= 1e-3 * std::max(prev, 1e-12))
            break;
        prev = obj;
    }
    VectorXd phases(a.size());
    for (Eigen::Index i = 0; i < a.size(); i++)
        phases(i) = std::arg(a(i));
    return phases;
}

double exact_avg_gain(double theta, double r, const AnalogChainDesign &dsg,
                      const SystemConfig &cfg, int chain)
{
    const VectorXd f = cfg.subcarrier_freqs();
    double g = 0.0;
    for (Eigen::Index m = 0; m < f.size(); m++) {
        const VectorXcd b = chain_response(f(m), theta, r, cfg, chain);
        const VectorXcd v = chain_vector(dsg, f(m), cfg);
        g += std::abs(b.cwiseProduct(v).sum());
    }
    return g / (double(f.size()) * cfg.chain_span());
}

// One alternating pass sequence of MM phases and per-delay grid search.
static AnalogChainDesign robust_bcd(double theta, double r, const SystemConfig &cfg, int chain,
                                    AnalogChainDesign dsg, std::vector<double> *trace)
{
    const VectorXd f = cfg.subcarrier_freqs();
    const int M = int(f.size());
    const int lg = cfg.group_len();

    double prev = exact_avg_gain(theta, r, dsg, cfg, chain);
    if (trace != nullptr)
        trace->push_back(prev);
    for (int sweep = 0; sweep < 20; sweep++) {
        dsg.phases = robust_mm_ps(theta, r, dsg.delays, cfg, dsg.phases, chain);
        // gamma_{m,l} = phi_{m,l}^T a_l
        MatrixXcd coeff(M, cfg.n_ttd);
        for (int m = 0; m < M; m++) {
            const VectorXcd b = chain_response(f(m), theta, r, cfg, chain);
            for (int l = 0; l < cfg.n_ttd; l++) {
                cxd s(0.0, 0.0);
                for (int q = 0; q < lg; q++)
                    s += b(l * lg + q) * std::polar(1.0, dsg.phases(l * lg + q));
                coeff(m, l) = s;
            }
        }
        dsg.delays = cyclic_delay_search(coeff, dsg.delays, cfg, 1000, 1, 1e-3);
        const double obj = exact_avg_gain(theta, r, dsg, cfg, chain);
        if (trace != nullptr)
            trace->push_back(obj);
        if (obj - prev <= 1e-3 * std::max(prev, 1e-12))
            break;
        prev = obj;
    }
    return dsg;
}

AnalogChainDesign robust_analog_design(double theta, double r, const SystemConfig &cfg, int chain,
                                       std::vector<double> *trace)
{
    AnalogChainDesign init = pnf_chain_design(theta, r, cfg, chain);
    init.mode = AnalogDesignMode::Robust;

    // The symmetric subcarrier grid makes the matched-phase design an exact
    // fixed point of the MM map (the accumulator comes out real-aligned with
    // the incumbent phases), so a lone start from it never moves. Run extra
    // starts with deterministic symmetry-breaking offsets and keep the best
    // final design; the unperturbed start always stays among the candidates.
    AnalogChainDesign best = robust_bcd(theta, r, cfg, chain, init, trace);
    double best_gain = exact_avg_gain(theta, r, best, cfg, chain);
    for (double amp : {0.3, -0.5}) {
        AnalogChainDesign seed = init;
        for (Eigen::Index i = 0; i < seed.phases.size(); i++)
            seed.phases(i) += amp * std::sin(2.4 * double(i) + 0.7);
        const AnalogChainDesign cand = robust_bcd(theta, r, cfg, chain, seed, nullptr);
        const double gain = exact_avg_gain(theta, r, cand, cfg, chain);
        if (gain > best_gain) {
            best_gain = gain;
            best = cand;
        }
    }
    return best;
}

VectorXcd equivalent_channel(const ChannelTensor &h, const PhaseNetwork &ps,
                             const DelayNetwork &delays, int m, int k, const SystemConfig &cfg)
{
    const MatrixXcd AT = assemble_analog(ps, delays, cfg.subcarrier_freq(m), cfg);
    return AT.adjoint() * h[m - 1].col(k - 1);
}

DigitalPrecoder digital_stage(const ChannelTensor &h, const PhaseNetwork &ps,
                              const DelayNetwork &delays, const VectorXd &noise,
                              const SystemConfig &cfg, fda::FpResult *fp_info)
{
    const VectorXd f = cfg.subcarrier_freqs();
    const int M = cfg.n_subcarriers;
    std::vector<Eigen::LLT<MatrixXcd>> chol(static_cast<size_t>(M));
    MatStack Heq(static_cast<size_t>(M)); // whitened equivalent channels
    for (int m = 0; m < M; m++) {
        const MatrixXcd AT = assemble_analog(ps, delays, f(m), cfg);
        MatrixXcd G = AT.adjoint() * AT;
        chol[size_t(m)].compute(G);
        if (chol[size_t(m)].info() != Eigen::Success) {
            G.diagonal().array() += 1e-12 * std::max(1.0, G.real().trace());
            chol[size_t(m)].compute(G);
        }
        const MatrixXcd Ht = AT.adjoint() * h[m]; // equivalent channels, all users
        // whiten: L^{-1} h so the power constraint becomes a plain norm bound
        Heq[size_t(m)] =
            chol[size_t(m)].matrixL().solve(Ht);
    }

    fda::FpResult fp = fda::fp_digital_solve(Heq, noise, cfg.tx_power);
    DigitalPrecoder D;
    D.d.resize(size_t(M));
    for (int m = 0; m < M; m++) {
        MatrixXcd Dm = chol[size_t(m)].matrixU().solve(fp.W[size_t(m)]); // L^{-H} W
        // exact per-subcarrier power
        const MatrixXcd AT = assemble_analog(ps, delays, f(m), cfg);
        const double nrm = (AT * Dm).norm();
        if (nrm > 0.0)
            Dm *= std::sqrt(cfg.tx_power) / nrm;
        D.d[size_t(m)] = std::move(Dm);
    }
    if (fp_info != nullptr) {
        fp_info->objective_trace = std::move(fp.objective_trace);
        fp_info->iters = fp.iters;
        fp_info->converged = fp.converged;
    }
    return D;
}

SolverReport hts_solve(const ChannelTensor &h, const Scenario &scn, const SystemConfig &cfg,
                       AnalogDesignMode mode)
{
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();

    HybridBeamformer hb = HybridBeamformer::zeros(cfg);
    for (int n = 0; n < cfg.n_rf; n++) {
        int target = n;
        if (n >= cfg.n_users) {
            Rng rng(hash_seed(scn.rng_seed, 0x4854530000ULL + std::uint64_t(n)));
            target = int(rng.uniform() * cfg.n_users);
            target = std::min(target, cfg.n_users - 1);
        }
        const UserGeometry &u = scn.users[size_t(target)];
        AnalogChainDesign dsg = mode == AnalogDesignMode::PNF
                                    ? pnf_chain_design(u.angle, u.range, cfg, n)
                                    : robust_analog_design(u.angle, u.range, cfg, n);
        dsg.target_user = target;
        hb.ps.chain_phases[size_t(n)] = dsg.phases;
        hb.delays.t.row(n) = dsg.delays.transpose();
    }

    const VectorXd noise = noise_vector(scn);
    fda::FpResult fp;
    hb.digital = digital_stage(h, hb.ps, hb.delays, noise, cfg, &fp);

    SolverReport rep;
    rep.objective_trace = fp.objective_trace;
    rep.inner_iters = fp.iters;
    rep.converged = fp.converged;
    rep.spectral_efficiency = spectral_efficiency(h, hb, noise, cfg);
    rep.hybrid = std::move(hb);
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

} // namespace hts
} // namespace nfbeam

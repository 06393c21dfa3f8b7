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

#include "nfbeam/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace nfbeam {
namespace baselines {

using hts::AnalogChainDesign;
using hts::AnalogDesignMode;

static VectorXd conj_phases(const VectorXcd &v)
{
    VectorXd p(v.size());
    for (Eigen::Index i = 0; i < v.size(); i++)
        p(i) = v(i) == cxd(0.0, 0.0) ? 0.0 : -std::arg(v(i));
    return p;
}

AnalogChainDesign cf_analog(double theta, double r, const SystemConfig &cfg, int chain)
{
    AnalogChainDesign dsg;
    dsg.phases = conj_phases(hts::chain_response(cfg.center_freq, theta, r, cfg, chain));
    dsg.delays = VectorXd::Zero(cfg.n_ttd);
    return dsg;
}

AnalogChainDesign mcm_analog(double theta, double r, const SystemConfig &cfg, int chain)
{
    const VectorXd f = cfg.subcarrier_freqs();
    VectorXcd mean = VectorXcd::Zero(cfg.chain_span());
    for (Eigen::Index m = 0; m < f.size(); m++)
        mean += hts::chain_response(f(m), theta, r, cfg, chain);
    mean /= double(f.size());
    AnalogChainDesign dsg;
    dsg.phases = conj_phases(mean);
    dsg.delays = VectorXd::Zero(cfg.n_ttd);
    return dsg;
}

AnalogChainDesign mccm_analog(double theta, double r, const SystemConfig &cfg, int chain)
{
    const VectorXd f = cfg.subcarrier_freqs();
    const int span = cfg.chain_span();
    MatrixXcd R = MatrixXcd::Zero(span, span);
    for (Eigen::Index m = 0; m < f.size(); m++) {
        const VectorXcd b = hts::chain_response(f(m), theta, r, cfg, chain);
        R.noalias() += b * b.adjoint();
    }
    R /= double(f.size());

    // principal eigenvector by power iteration, seeded with the center response
    VectorXcd u = hts::chain_response(cfg.center_freq, theta, r, cfg, chain);
    u /= u.norm();
    for (int it = 0; it < 200; it++) {
        VectorXcd v = R * u;
        const double nrm = v.norm();
        if (nrm <= 0.0)
            break;
        v /= nrm;
        const double residual = (v - u).norm();
        u = v;
        if (residual < 1e-10)
            break;
    }
    AnalogChainDesign dsg;
    dsg.phases = conj_phases(u);
    dsg.delays = VectorXd::Zero(cfg.n_ttd);
    return dsg;
}

AnalogChainDesign far_field_dpp(double theta, const SystemConfig &cfg, int chain)
{
    const int lg = cfg.group_len();
    const double d = cfg.spacing();
    const double kc = 2.0 * pi * cfg.center_freq / speed_of_light;
    const double ct = std::cos(theta);
    AnalogChainDesign dsg;
    dsg.phases.resize(cfg.chain_span());
    dsg.delays.resize(cfg.n_ttd);
    double wmax = -1e300;
    for (int l = 0; l < cfg.n_ttd; l++)
        wmax = std::max(wmax, -cfg.group_center(chain, l) * ct);
    for (int l = 0; l < cfg.n_ttd; l++) {
        const double w = -cfg.group_center(chain, l) * ct;
        dsg.delays(l) = std::clamp((wmax - w) * d / speed_of_light, 0.0, cfg.t_max);
        for (int q = 0; q < lg; q++) {
            const double chi = double(q) - 0.5 * (lg - 1);
            dsg.phases(l * lg + q) = -kc * chi * d * ct;
        }
    }
    return dsg;
}

AnalogChainDesign near_field_pdf(double theta, double r, const SystemConfig &cfg, int chain)
{
    const hts::PnfGeometry g = hts::pnf_geometry(theta, r, cfg, chain);
    const int lg = cfg.group_len();
    const double d = cfg.spacing();
    const double kc = 2.0 * pi * cfg.center_freq / speed_of_light;
    AnalogChainDesign dsg;
    dsg.phases.resize(cfg.chain_span());
    dsg.delays.resize(cfg.n_ttd);
    for (int l = 0; l < cfg.n_ttd; l++) {
        dsg.delays(l) =
            std::clamp((g.nu_max - g.nu(l)) / speed_of_light, 0.0, cfg.t_max);
        const double ct = std::cos(g.vartheta(l));
        for (int q = 0; q < lg; q++) {
            const double chi = double(q) - 0.5 * (lg - 1);
            dsg.phases(l * lg + q) = -kc * chi * d * ct;
        }
    }
    return dsg;
}

SolverReport optimal_digital(const ChannelTensor &h, const Scenario &scn, const SystemConfig &cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    const VectorXd noise = noise_vector(scn);
    fda::FpResult fp = fda::fp_digital_solve(h.h, noise, cfg.tx_power);

    FullyDigitalPrecoder W;
    W.w = std::move(fp.W);
    for (auto &Wm : W.w) {
        const double nrm = Wm.norm();
        if (nrm > 0.0)
            Wm *= std::sqrt(cfg.tx_power) / nrm;
    }

    SolverReport rep;
    rep.objective_trace = std::move(fp.objective_trace);
    rep.inner_iters = fp.iters;
    rep.converged = fp.converged;
    rep.spectral_efficiency = spectral_efficiency_digital(h, W, noise, cfg);
    rep.digital = std::move(W);
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// Chain n targets user n; surplus chains target a seeded random user.
static int chain_target(const Scenario &scn, const SystemConfig &cfg, int n)
{
    if (n < cfg.n_users)
        return n;
    Rng rng(hash_seed(scn.rng_seed, 0x4854530000ULL + std::uint64_t(n)));
    return std::min(int(rng.uniform() * cfg.n_users), cfg.n_users - 1);
}

// Analog front end from a per-chain designer plus the digital stage.
template <typename Designer>
static SolverReport run_analog_scheme(const ChannelTensor &h, const Scenario &scn,
                                      const SystemConfig &cfg, Designer &&designer)
{
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    HybridBeamformer hb = HybridBeamformer::zeros(cfg);
    for (int n = 0; n < cfg.n_rf; n++) {
        const int target = chain_target(scn, cfg, n);
        const UserGeometry &u = scn.users[size_t(target)];
        AnalogChainDesign dsg = designer(u.angle, u.range, n);
        hb.ps.chain_phases[size_t(n)] = dsg.phases;
        hb.delays.t.row(n) = dsg.delays.transpose();
    }
    const VectorXd noise = noise_vector(scn);
    fda::FpResult fp;
    hb.digital = hts::digital_stage(h, hb.ps, hb.delays, noise, cfg, &fp);

    SolverReport rep;
    rep.objective_trace = std::move(fp.objective_trace);
    rep.inner_iters = fp.iters;
    rep.converged = fp.converged;
    rep.spectral_efficiency = spectral_efficiency(h, hb, noise, cfg);
    rep.hybrid = std::move(hb);
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

SolverReport conventional_ps(const ChannelTensor &h, const Scenario &scn, const SystemConfig &cfg,
                             const fda::FdaOptions &opt)
{
    SystemConfig c = cfg;
    c.architecture = Architecture::FullyConnected;
    c.validate();

    // PS-only starting point: center-frequency match per chain, zero delays
    HybridBeamformer init = HybridBeamformer::zeros(c);
    for (int n = 0; n < c.n_rf; n++) {
        const int target = chain_target(scn, c, n);
        const UserGeometry &u = scn.users[size_t(target)];
        init.ps.chain_phases[size_t(n)] = cf_analog(u.angle, u.range, c, n).phases;
    }
    const VectorXd noise = noise_vector(scn);
    init.digital = hts::digital_stage(h, init.ps, init.delays, noise, c);

    fda::FdaOptions o = opt;
    o.freeze_delays = true;
    return fda::solve_fda(h, noise, c, init, o);
}

SystemConfig effective_config(const SystemConfig &cfg, SchemeId scheme)
{
    SystemConfig c = cfg;
    switch (scheme) {
    case SchemeId::FDA_Full:
    case SchemeId::ConventionalPS:
        c.architecture = Architecture::FullyConnected;
        break;
    case SchemeId::FDA_Sub:
        c.architecture = Architecture::SubConnected;
        break;
    default:
        break;
    }
    return c;
}

SolverReport run_scheme(const ChannelTensor &h, const Scenario &scn, const SystemConfig &cfg,
                        SchemeId scheme, const fda::FdaOptions &opt)
{
    const SystemConfig c = effective_config(cfg, scheme);
    switch (scheme) {
    case SchemeId::OptimalDigital:
        return optimal_digital(h, scn, c);
    case SchemeId::ConventionalPS:
        return conventional_ps(h, scn, c, opt);
    case SchemeId::FDA_Full:
    case SchemeId::FDA_Sub: {
        SolverReport init = hts::hts_solve(h, scn, c, AnalogDesignMode::PNF);
        return fda::solve_fda(h, noise_vector(scn), c, *init.hybrid, opt);
    }
    case SchemeId::HTS_PNF:
        return hts::hts_solve(h, scn, c, AnalogDesignMode::PNF);
    case SchemeId::HTS_Robust:
        return hts::hts_solve(h, scn, c, AnalogDesignMode::Robust);
    case SchemeId::CF:
        return run_analog_scheme(h, scn, c, [&](double th, double r, int n) {
            return cf_analog(th, r, c, n);
        });
    case SchemeId::MCM:
        return run_analog_scheme(h, scn, c, [&](double th, double r, int n) {
            return mcm_analog(th, r, c, n);
        });
    case SchemeId::MCCM:
        return run_analog_scheme(h, scn, c, [&](double th, double r, int n) {
            return mccm_analog(th, r, c, n);
        });
    case SchemeId::FarFieldDPP:
        return run_analog_scheme(h, scn, c, [&](double th, double, int n) {
            return far_field_dpp(th, c, n);
        });
    case SchemeId::NearFieldPDF:
        return run_analog_scheme(h, scn, c, [&](double th, double r, int n) {
            return near_field_pdf(th, r, c, n);
        });
    }
    throw std::invalid_argument("bad scheme id");
}

} // namespace baselines
} // namespace nfbeam

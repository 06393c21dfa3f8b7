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

#include "nfbeam/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace nfbeam {

std::string to_string(SchemeId s)
{
    switch (s) {
    case SchemeId::OptimalDigital: return "optimal_digital";
    case SchemeId::ConventionalPS: return "conventional_ps";
    case SchemeId::CF: return "cf";
    case SchemeId::MCM: return "mcm";
    case SchemeId::MCCM: return "mccm";
    case SchemeId::FarFieldDPP: return "far_field_dpp";
    case SchemeId::NearFieldPDF: return "near_field_pdf";
    case SchemeId::FDA_Full: return "fda_full";
    case SchemeId::FDA_Sub: return "fda_sub";
    case SchemeId::HTS_PNF: return "hts_pnf";
    case SchemeId::HTS_Robust: return "hts_robust";
    }
    throw std::invalid_argument("bad scheme id");
}

SchemeId scheme_from_string(const std::string &s)
{
    for (int i = 0; i <= int(SchemeId::HTS_Robust); i++)
        if (to_string(SchemeId(i)) == s)
            return SchemeId(i);
    throw std::invalid_argument("Unknown scheme: " + s);
}

VectorXd noise_vector(const Scenario &scn)
{
    VectorXd v(Eigen::Index(scn.users.size()));
    for (size_t k = 0; k < scn.users.size(); k++)
        v(Eigen::Index(k)) = scn.users[k].noise_var;
    return v;
}

static void signal_powers(const ChannelTensor &h, const HybridBeamformer &hb, int m, int k,
                          const SystemConfig &cfg, double &desired, double &interference)
{
    const MatrixXcd ATD = effective_precoder(hb, m, cfg);
    const VectorXcd g = ATD.adjoint() * h[m - 1].col(k - 1); // entry i = (h^H ATD e_i)^*
    desired = std::norm(g(k - 1));
    interference = g.squaredNorm() - desired;
}

double sinr(const ChannelTensor &h, const HybridBeamformer &hb, int m, int k, double noise_var,
            const SystemConfig &cfg)
{
    double sig, intf;
    signal_powers(h, hb, m, k, cfg, sig, intf);
    return sig / (intf + noise_var);
}

double modified_sinr_hybrid(const ChannelTensor &h, const HybridBeamformer &hb, int m, int k,
                            double noise_var, const SystemConfig &cfg)
{
    double sig, intf;
    signal_powers(h, hb, m, k, cfg, sig, intf);
    const double load = effective_precoder(hb, m, cfg).squaredNorm() / cfg.tx_power;
    if (load <= 0.0)
        return 0.0;
    return sig / (intf + noise_var * load);
}

double modified_sinr_hat(const MatrixXcd &H_m, const MatrixXcd &W_m, int k, double noise_var,
                         double tx_power)
{
    const double wnorm2 = W_m.squaredNorm();
    if (wnorm2 <= 0.0)
        return 0.0;
    const VectorXcd g = W_m.adjoint() * H_m.col(k - 1);
    const double sig = std::norm(g(k - 1));
    const double intf = g.squaredNorm() - sig;
    return sig / (intf + noise_var / tx_power * wnorm2);
}

double spectral_efficiency(const ChannelTensor &h, const HybridBeamformer &hb,
                           const VectorXd &noise, const SystemConfig &cfg)
{
    double sum = 0.0;
    for (int m = 1; m <= cfg.n_subcarriers; m++) {
        const MatrixXcd ATD = effective_precoder(hb, m, cfg);
        for (int k = 1; k <= cfg.n_users; k++) {
            const VectorXcd g = ATD.adjoint() * h[m - 1].col(k - 1);
            const double sig = std::norm(g(k - 1));
            const double intf = g.squaredNorm() - sig;
            sum += std::log2(1.0 + sig / (intf + noise(k - 1)));
        }
    }
    return sum / double(cfg.n_subcarriers + cfg.cp_length);
}

double spectral_efficiency_digital(const ChannelTensor &h, const FullyDigitalPrecoder &W,
                                   const VectorXd &noise, const SystemConfig &cfg)
{
    double sum = 0.0;
    for (int m = 1; m <= cfg.n_subcarriers; m++)
        for (int k = 1; k <= cfg.n_users; k++)
            sum += std::log2(1.0 + modified_sinr_hat(h[m - 1], W[m - 1], k, noise(k - 1),
                                                     cfg.tx_power));
    return sum / double(cfg.n_subcarriers + cfg.cp_length);
}

RateReport rate_report(const ChannelTensor &h, const HybridBeamformer &hb, const VectorXd &noise,
                       const SystemConfig &cfg)
{
    RateReport rep;
    rep.rates.resize(cfg.n_subcarriers, cfg.n_users);
    for (int m = 1; m <= cfg.n_subcarriers; m++)
        for (int k = 1; k <= cfg.n_users; k++)
            rep.rates(m - 1, k - 1) = std::log2(1.0 + sinr(h, hb, m, k, noise(k - 1), cfg));
    rep.spectral_efficiency = rep.rates.sum() / double(cfg.n_subcarriers + cfg.cp_length);
    return rep;
}

RateReport rate_report(const ChannelTensor &h, const HybridBeamformer &hb, const VectorXd &noise,
                       const SystemConfig &cfg, const PowerModel &pm, SchemeId scheme)
{
    RateReport rep = rate_report(h, hb, noise, cfg);
    rep.energy_efficiency = energy_efficiency(rep.spectral_efficiency, cfg, pm, scheme);
    return rep;
}

double normalized_array_gain(double f, double theta, double r, const VectorXcd &v,
                             const SystemConfig &cfg)
{
    const VectorXcd b = array_response(f, theta, r, cfg);
    return std::abs(b.cwiseProduct(v).sum()) / double(cfg.n_antennas);
}

double total_power(const SystemConfig &cfg, const PowerModel &pm, SchemeId scheme)
{
    const double N = cfg.n_antennas, NRF = cfg.n_rf, NT = cfg.n_ttd;
    const double ttd_count =
        cfg.ttd_power_convention == TtdPowerConvention::PerChain ? NRF * NT : N * NT;
    const bool sub = cfg.architecture == Architecture::SubConnected;

    switch (scheme) {
    case SchemeId::OptimalDigital:
        return cfg.tx_power + pm.p_bb + N * pm.p_rf;
    case SchemeId::ConventionalPS:
    case SchemeId::CF:
    case SchemeId::MCM:
    case SchemeId::MCCM:
        // PS-only analog front end, no TTD term
        return cfg.tx_power + pm.p_bb + NRF * pm.p_rf + (sub ? N : N * NRF) * pm.p_ps;
    case SchemeId::FDA_Full:
    case SchemeId::HTS_PNF:
    case SchemeId::HTS_Robust:
    case SchemeId::FarFieldDPP:
    case SchemeId::NearFieldPDF:
        if (!sub)
            return cfg.tx_power + pm.p_bb + NRF * pm.p_rf + N * NRF * pm.p_ps +
                   ttd_count * pm.p_ttd;
        return cfg.tx_power + pm.p_bb + NRF * pm.p_rf + N * pm.p_ps + ttd_count * pm.p_ttd;
    case SchemeId::FDA_Sub:
        return cfg.tx_power + pm.p_bb + NRF * pm.p_rf + N * pm.p_ps + ttd_count * pm.p_ttd;
    }
    throw std::invalid_argument("bad scheme id");
}

double energy_efficiency(double se, const SystemConfig &cfg, const PowerModel &pm, SchemeId scheme)
{
    if (se < 0.0)
        throw std::invalid_argument("spectral efficiency must be nonnegative");
    return se / total_power(cfg, pm, scheme);
}

} // namespace nfbeam

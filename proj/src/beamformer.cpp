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

#include "nfbeam/beamformer.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace nfbeam {

PhaseNetwork PhaseNetwork::zeros(const SystemConfig &cfg)
{
    PhaseNetwork ps;
    ps.architecture = cfg.architecture;
    ps.chain_phases.assign(size_t(cfg.n_rf), VectorXd::Zero(cfg.chain_span()));
    return ps;
}

VectorXcd PhaseNetwork::group_vector(int n, int l, const SystemConfig &cfg) const
{
    const auto seg = group(n, l, cfg);
    VectorXcd a(seg.size());
    for (Eigen::Index i = 0; i < seg.size(); i++)
        a(i) = std::polar(1.0, seg(i));
    return a;
}

MatrixXcd PhaseNetwork::dense_matrix(const SystemConfig &cfg) const
{
    MatrixXcd A = MatrixXcd::Zero(cfg.n_antennas, cfg.n_ttd * cfg.n_rf);
    for (int n = 0; n < cfg.n_rf; n++)
        for (int l = 0; l < cfg.n_ttd; l++)
            A.block(cfg.group_offset(n, l), n * cfg.n_ttd + l, cfg.group_len(), 1) =
                group_vector(n, l, cfg);
    return A;
}

DelayNetwork DelayNetwork::zeros(const SystemConfig &cfg)
{
    return DelayNetwork{MatrixXd::Zero(cfg.n_rf, cfg.n_ttd)};
}

bool DelayNetwork::within_bounds(const SystemConfig &cfg, double slack) const
{
    return (t.array() >= -slack).all() && (t.array() <= cfg.t_max + slack).all();
}

DigitalPrecoder DigitalPrecoder::zeros(const SystemConfig &cfg)
{
    DigitalPrecoder d;
    d.d.assign(size_t(cfg.n_subcarriers), MatrixXcd::Zero(cfg.n_rf, cfg.n_users));
    return d;
}

HybridBeamformer HybridBeamformer::zeros(const SystemConfig &cfg)
{
    HybridBeamformer hb;
    hb.architecture = cfg.architecture;
    hb.ps = PhaseNetwork::zeros(cfg);
    hb.delays = DelayNetwork::zeros(cfg);
    hb.digital = DigitalPrecoder::zeros(cfg);
    return hb;
}

MatrixXcd ttd_response(const DelayNetwork &delays, double f, const SystemConfig &cfg)
{
    MatrixXcd T = MatrixXcd::Zero(cfg.n_ttd * cfg.n_rf, cfg.n_rf);
    for (int n = 0; n < cfg.n_rf; n++)
        for (int l = 0; l < cfg.n_ttd; l++)
            T(n * cfg.n_ttd + l, n) = std::polar(1.0, -2.0 * pi * f * delays.t(n, l));
    return T;
}

VectorXcd analog_column(const PhaseNetwork &ps, const DelayNetwork &delays, double f, int n,
                        const SystemConfig &cfg)
{
    VectorXcd col = VectorXcd::Zero(cfg.n_antennas);
    const int lg = cfg.group_len();
    for (int l = 0; l < cfg.n_ttd; l++) {
        const double shift = -2.0 * pi * f * delays.t(n, l);
        const auto seg = ps.group(n, l, cfg);
        const int off = cfg.group_offset(n, l);
        for (int i = 0; i < lg; i++)
            col(off + i) = std::polar(1.0, seg(i) + shift);
    }
    return col;
}

MatrixXcd assemble_analog(const PhaseNetwork &ps, const DelayNetwork &delays, double f,
                          const SystemConfig &cfg)
{
    if (ps.n_chains() != cfg.n_rf || int(ps.chain_phases.front().size()) != cfg.chain_span())
        throw std::invalid_argument("phase network shape does not match configuration");
    if (delays.t.rows() != cfg.n_rf || delays.t.cols() != cfg.n_ttd)
        throw std::invalid_argument("delay network shape does not match configuration");
    MatrixXcd AT(cfg.n_antennas, cfg.n_rf);
    for (int n = 0; n < cfg.n_rf; n++)
        AT.col(n) = analog_column(ps, delays, f, n, cfg);
    return AT;
}

MatrixXcd effective_precoder(const HybridBeamformer &hb, int m, const SystemConfig &cfg)
{
    return assemble_analog(hb.ps, hb.delays, cfg.subcarrier_freq(m), cfg) * hb.digital[m - 1];
}

HybridBeamformer power_rescale(const HybridBeamformer &hb, const SystemConfig &cfg)
{
    HybridBeamformer out = hb;
    for (int m = 1; m <= cfg.n_subcarriers; m++) {
        const double nrm = effective_precoder(hb, m, cfg).norm();
        if (!(nrm > 0.0))
            throw std::domain_error("cannot rescale a zero-norm effective precoder");
        out.digital[m - 1] *= std::sqrt(cfg.tx_power) / nrm;
    }
    return out;
}

std::string HybridBeamformer::to_json() const
{
    nlohmann::json j;
    j["version"] = 1;
    j["architecture"] = to_string(architecture);
    j["phases"] = nlohmann::json::array();
    for (const auto &p : ps.chain_phases)
        j["phases"].push_back(std::vector<double>(p.data(), p.data() + p.size()));
    j["delays"] = nlohmann::json::array();
    for (Eigen::Index n = 0; n < delays.t.rows(); n++) {
        std::vector<double> row(size_t(delays.t.cols()));
        for (Eigen::Index l = 0; l < delays.t.cols(); l++)
            row[size_t(l)] = delays.t(n, l);
        j["delays"].push_back(row);
    }
    j["digital"] = nlohmann::json::array();
    for (const auto &D : digital.d) {
        nlohmann::json jd;
        jd["rows"] = D.rows();
        jd["cols"] = D.cols();
        std::vector<double> data;
        data.reserve(size_t(2 * D.size()));
        for (Eigen::Index c = 0; c < D.cols(); c++)
            for (Eigen::Index r = 0; r < D.rows(); r++) {
                data.push_back(D(r, c).real());
                data.push_back(D(r, c).imag());
            }
        jd["data"] = data;
        j["digital"].push_back(jd);
    }
    return j.dump();
}

HybridBeamformer HybridBeamformer::from_json(const std::string &text)
{
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("version", 0) != 1)
        throw std::invalid_argument("unsupported beamformer format version");
    HybridBeamformer hb;
    hb.architecture = architecture_from_string(j.at("architecture").get<std::string>());
    hb.ps.architecture = hb.architecture;
    for (const auto &jp : j.at("phases")) {
        auto v = jp.get<std::vector<double>>();
        hb.ps.chain_phases.push_back(Eigen::Map<VectorXd>(v.data(), Eigen::Index(v.size())));
    }
    auto rows = j.at("delays").get<std::vector<std::vector<double>>>();
    hb.delays.t.resize(Eigen::Index(rows.size()), Eigen::Index(rows.empty() ? 0 : rows[0].size()));
    for (size_t n = 0; n < rows.size(); n++)
        for (size_t l = 0; l < rows[n].size(); l++)
            hb.delays.t(Eigen::Index(n), Eigen::Index(l)) = rows[n][l];
    for (const auto &jd : j.at("digital")) {
        Eigen::Index r = jd.at("rows"), c = jd.at("cols");
        auto data = jd.at("data").get<std::vector<double>>();
        if (Eigen::Index(data.size()) != 2 * r * c)
            throw std::invalid_argument("digital precoder data length mismatch");
        MatrixXcd D(r, c);
        size_t i = 0;
        for (Eigen::Index cc = 0; cc < c; cc++)
            for (Eigen::Index rr = 0; rr < r; rr++) {
                D(rr, cc) = cxd(data[i], data[i + 1]);
                i += 2;
            }
        hb.digital.d.push_back(std::move(D));
    }
    return hb;
}

} // namespace nfbeam

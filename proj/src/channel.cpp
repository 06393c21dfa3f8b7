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

#include "nfbeam/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace nfbeam {

double propagation_distance(int n, double r, double theta, const SystemConfig &cfg)
{
    const double chi = double(n - 1) - 0.5 * (cfg.n_antennas - 1);
    const double d = cfg.spacing();
    return std::sqrt(r * r + chi * chi * d * d - 2.0 * r * chi * d * std::cos(theta));
}

VectorXcd array_response(double f, double theta, double r, const SystemConfig &cfg)
{
    VectorXcd b(cfg.n_antennas);
    const double scale = 2.0 * pi * f / speed_of_light;
    for (int n = 1; n <= cfg.n_antennas; n++)
        b(n - 1) = std::polar(1.0, -scale * (propagation_distance(n, r, theta, cfg) - r));
    return b;
}

double los_gain(double f, double r, const SystemConfig &cfg)
{
    return speed_of_light / (4.0 * pi * f * r) * std::exp(-0.5 * cfg.k_abs * r);
}

cxd reflection_coeff(double f, const ScattererGeometry &s)
{
    if (s.model == ReflectionModel::Simplified)
        return std::polar(std::pow(10.0, s.avg_reflection_db / 20.0), s.phase);

    if (s.impedance <= 0.0)
        throw std::domain_error("material impedance must be positive");
    const double n_r = 376.730313668 / s.impedance; // Z0 / Z(f)
    const double phi_ref = std::atan(std::sin(s.incidence) / n_r);
    const double ci = std::cos(s.incidence);
    const double cr = std::cos(phi_ref);
    const double fresnel = (ci - n_r * cr) / (ci + n_r * cr);
    const double rough = 4.0 * pi * f * s.roughness * ci / speed_of_light;
    return cxd(fresnel * std::exp(-0.5 * rough * rough), 0.0);
}

ChannelTensor build_channel(const Scenario &scn, const SystemConfig &cfg)
{
    scn.validate(cfg);
    ChannelTensor ch;
    ch.h.resize(size_t(cfg.n_subcarriers));
    const double delay_scale = 2.0 * pi / speed_of_light;
    for (int m = 1; m <= cfg.n_subcarriers; m++) {
        const double fm = cfg.subcarrier_freq(m);
        MatrixXcd H(cfg.n_antennas, cfg.n_users);
        for (int k = 0; k < cfg.n_users; k++) {
            const UserGeometry &u = scn.users[size_t(k)];
            // LoS: the gain phase carries the absolute propagation delay so
            // that the composite term is exp(-j 2 pi f r_n / c) entrywise
            cxd beta = std::polar(los_gain(fm, u.range, cfg), -delay_scale * fm * u.range);
            VectorXcd h = beta * array_response(fm, u.angle, u.range, cfg).conjugate();
            for (const auto &s : scn.scatterers[size_t(k)]) {
                cxd beta_nlos = reflection_coeff(fm, s) * los_gain(fm, u.range, cfg) *
                                std::polar(1.0, -delay_scale * fm * s.range);
                h += beta_nlos * array_response(fm, s.angle, s.range, cfg).conjugate();
            }
            H.col(k) = h;
        }
        ch.h[size_t(m - 1)] = std::move(H);
    }
    return ch;
}

} // namespace nfbeam

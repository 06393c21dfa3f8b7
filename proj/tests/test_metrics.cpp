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
#include <doctest.h>

using namespace nfbeam;

namespace {

SystemConfig metric_config()
{
    SystemConfig cfg;
    cfg.n_antennas = 4;
    cfg.n_subcarriers = 2;
    cfg.n_users = 2;
    cfg.n_rf = 2;
    cfg.n_ttd = 2;
    cfg.cp_length = 1;
    cfg.t_max = 4.0 / (2.0 * cfg.center_freq);
    return cfg;
}

struct Instance {
    SystemConfig cfg;
    Scenario scn;
    ChannelTensor h;
    HybridBeamformer hb;
};

Instance random_instance(std::uint64_t seed)
{
    Instance in;
    in.cfg = metric_config();
    in.scn = sample_scenario(seed, in.cfg, 1);
    in.h = build_channel(in.scn, in.cfg);
    Rng rng(seed + 100);
    in.hb = HybridBeamformer::zeros(in.cfg);
    for (auto &p : in.hb.ps.chain_phases)
        for (Eigen::Index i = 0; i < p.size(); i++)
            p(i) = rng.uniform(-pi, pi);
    for (Eigen::Index i = 0; i < in.hb.delays.t.size(); i++)
        in.hb.delays.t.data()[i] = rng.uniform(0.0, in.cfg.t_max);
    for (auto &D : in.hb.digital.d)
        for (Eigen::Index i = 0; i < D.size(); i++)
            D.data()[i] = cxd(rng.normal(), rng.normal()) * 1e-3;
    return in;
}

} // namespace

TEST_CASE("sinr")
{
    Instance in = random_instance(1);
    const VectorXd noise = noise_vector(in.scn);

    SUBCASE("zero precoder")
    {
        HybridBeamformer hb = in.hb;
        for (auto &D : hb.digital.d)
            D.setZero();
        CHECK(sinr(in.h, hb, 1, 1, noise(0), in.cfg) == 0.0);
    }
    SUBCASE("single user has no interference term")
    {
        SystemConfig cfg = in.cfg;
        cfg.n_users = 1;
        cfg.n_rf = 1;
        Scenario scn = sample_scenario(2, cfg, 0);
        const ChannelTensor h = build_channel(scn, cfg);
        Rng rng(7);
        HybridBeamformer hb = HybridBeamformer::zeros(cfg);
        for (auto &p : hb.ps.chain_phases)
            for (Eigen::Index i = 0; i < p.size(); i++)
                p(i) = rng.uniform(-pi, pi);
        for (auto &D : hb.digital.d)
            D.setConstant(cxd(2e-3, 1e-3));
        const double expected =
            std::norm(h[0].col(0).dot(effective_precoder(hb, 1, cfg).col(0))) /
            scn.users[0].noise_var;
        CHECK(sinr(h, hb, 1, 1, scn.users[0].noise_var, cfg) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("matches the scalar definition")
    {
        for (int m = 1; m <= in.cfg.n_subcarriers; m++)
            for (int k = 1; k <= in.cfg.n_users; k++) {
                const MatrixXcd ATD = effective_precoder(in.hb, m, in.cfg);
                double sig = 0.0, intf = 0.0;
                for (int i = 1; i <= in.cfg.n_users; i++) {
                    cxd dot(0.0, 0.0);
                    for (int a = 0; a < in.cfg.n_antennas; a++)
                        dot += std::conj(in.h[m - 1](a, k - 1)) * ATD(a, i - 1);
                    (i == k ? sig : intf) += std::norm(dot);
                }
                CHECK(sinr(in.h, in.hb, m, k, noise(k - 1), in.cfg) ==
                      doctest::Approx(sig / (intf + noise(k - 1))).epsilon(1e-10));
            }
    }
}

TEST_CASE("power-normalized sinr")
{
    Instance in = random_instance(3);
    const VectorXd noise = noise_vector(in.scn);

    SUBCASE("zero precoder maps to zero")
    {
        const MatrixXcd W = MatrixXcd::Zero(in.cfg.n_antennas, in.cfg.n_users);
        CHECK(modified_sinr_hat(in.h[0], W, 1, noise(0), in.cfg.tx_power) == 0.0);
    }
    SUBCASE("invariant under positive scaling")
    {
        Rng rng(9);
        MatrixXcd W(in.cfg.n_antennas, in.cfg.n_users);
        for (Eigen::Index i = 0; i < W.size(); i++)
            W.data()[i] = cxd(rng.normal(), rng.normal());
        const double base = modified_sinr_hat(in.h[0], W, 2, noise(1), in.cfg.tx_power);
        for (double a : {1e-6, 0.31, 7.7, 1e5}) {
            const MatrixXcd Ws = a * W;
            CHECK(modified_sinr_hat(in.h[0], Ws, 2, noise(1), in.cfg.tx_power) ==
                  doctest::Approx(base).epsilon(1e-12));
        }
    }
    SUBCASE("matches the explicit formula")
    {
        Rng rng(11);
        MatrixXcd W(in.cfg.n_antennas, in.cfg.n_users);
        for (Eigen::Index i = 0; i < W.size(); i++)
            W.data()[i] = cxd(rng.normal(), rng.normal());
        const int k = 1;
        double sig = std::norm(in.h[0].col(0).dot(W.col(0)));
        double intf = std::norm(in.h[0].col(0).dot(W.col(1)));
        const double load = noise(0) / in.cfg.tx_power * W.squaredNorm();
        CHECK(modified_sinr_hat(in.h[0], W, k, noise(0), in.cfg.tx_power) ==
              doctest::Approx(sig / (intf + load)).epsilon(1e-12));
    }
    SUBCASE("hybrid variant is scale invariant and meets the true sinr at the budget")
    {
        const VectorXd nv = noise_vector(in.scn);
        const double base = modified_sinr_hybrid(in.h, in.hb, 1, 1, nv(0), in.cfg);
        HybridBeamformer scaled = in.hb;
        for (auto &D : scaled.digital.d)
            D *= 17.0;
        CHECK(modified_sinr_hybrid(in.h, scaled, 1, 1, nv(0), in.cfg) ==
              doctest::Approx(base).epsilon(1e-12));

        const HybridBeamformer at_budget = power_rescale(in.hb, in.cfg);
        for (int m = 1; m <= in.cfg.n_subcarriers; m++)
            for (int k = 1; k <= in.cfg.n_users; k++)
                CHECK(modified_sinr_hybrid(in.h, at_budget, m, k, nv(k - 1), in.cfg) ==
                      doctest::Approx(sinr(in.h, at_budget, m, k, nv(k - 1), in.cfg))
                          .epsilon(1e-10));
    }
}

TEST_CASE("spectral efficiency")
{
    Instance in = random_instance(5);
    const VectorXd noise = noise_vector(in.scn);

    SUBCASE("zero precoder gives zero rate")
    {
        HybridBeamformer hb = in.hb;
        for (auto &D : hb.digital.d)
            D.setZero();
        CHECK(spectral_efficiency(in.h, hb, noise, in.cfg) == 0.0);
    }
    SUBCASE("unit SINR on a single carrier")
    {
        SystemConfig cfg;
        cfg.n_antennas = 1;
        cfg.n_subcarriers = 1;
        cfg.cp_length = 0;
        cfg.n_users = 1;
        cfg.n_rf = 1;
        cfg.n_ttd = 1;
        cfg.t_max = 0.0;
        cfg.tx_power = 1.0;
        Scenario scn;
        const double s2 = cfg.noise_variance();
        scn.users = {{pi / 2, 10.0, s2}};
        scn.scatterers = {{}};
        ChannelTensor h;
        h.h = {MatrixXcd::Ones(1, 1)};
        HybridBeamformer hb = HybridBeamformer::zeros(cfg);
        hb.digital.d = {MatrixXcd::Constant(1, 1, cxd(std::sqrt(s2), 0.0))};
        CHECK(spectral_efficiency(h, hb, noise_vector(scn), cfg) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("equals the recomposed per-term sum")
    {
        double sum = 0.0;
        for (int m = 1; m <= in.cfg.n_subcarriers; m++)
            for (int k = 1; k <= in.cfg.n_users; k++)
                sum += std::log2(1.0 + sinr(in.h, in.hb, m, k, noise(k - 1), in.cfg));
        sum /= in.cfg.n_subcarriers + in.cfg.cp_length;
        CHECK(spectral_efficiency(in.h, in.hb, noise, in.cfg) ==
              doctest::Approx(sum).epsilon(1e-12));
        CHECK(rate_report(in.h, in.hb, noise, in.cfg).spectral_efficiency ==
              doctest::Approx(sum).epsilon(1e-12));
    }
    SUBCASE("invariant under a unit phase on one digital column")
    {
        HybridBeamformer hb = in.hb;
        hb.digital.d[0].col(1) *= std::polar(1.0, 1.234);
        CHECK(spectral_efficiency(in.h, hb, noise, in.cfg) ==
              doctest::Approx(spectral_efficiency(in.h, in.hb, noise, in.cfg)).epsilon(1e-12));
    }
}

TEST_CASE("normalized array gain")
{
    SystemConfig cfg = metric_config();
    const double f = cfg.center_freq, theta = 1.0, r = 8.0;
    const VectorXcd b = array_response(f, theta, r, cfg);

    SUBCASE("conjugate match reaches one")
    {
        CHECK(normalized_array_gain(f, theta, r, b.conjugate(), cfg) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("orthogonal vector reaches zero")
    {
        SystemConfig c2 = cfg;
        c2.n_antennas = 2;
        const VectorXcd b2 = array_response(f, theta, r, c2);
        VectorXcd v(2);
        v << -b2(1), b2(0);
        CHECK(normalized_array_gain(f, theta, r, v, c2) < 1e-12);
    }
    SUBCASE("never exceeds one for unit-modulus vectors")
    {
        Rng rng(13);
        for (int i = 0; i < 50; i++) {
            VectorXcd v(cfg.n_antennas);
            for (int n = 0; n < cfg.n_antennas; n++)
                v(n) = rng.unit_phasor();
            CHECK(normalized_array_gain(f, theta, r, v, cfg) <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("energy efficiency")
{
    PowerModel pm; // reference components: 300/200/30/100 mW
    CHECK(pm.p_bb == 0.3);
    CHECK(pm.p_rf == 0.2);
    CHECK(pm.p_ps == 0.03);
    CHECK(pm.p_ttd == 0.1);

    SystemConfig cfg = default_config(); // N=512, N_RF=4, N_T=16
    cfg.tx_power = 1.0;

    SUBCASE("fully-connected totals with per-chain TTD count")
    {
        CHECK(total_power(cfg, pm, SchemeId::FDA_Full) ==
              doctest::Approx(69.94).epsilon(1e-12));
    }
    SUBCASE("per-antenna TTD convention switch")
    {
        SystemConfig alt = cfg;
        alt.ttd_power_convention = TtdPowerConvention::PerAntenna;
        CHECK(total_power(alt, pm, SchemeId::FDA_Full) ==
              doctest::Approx(1.0 + 0.3 + 0.8 + 61.44 + 512.0 * 16.0 * 0.1).epsilon(1e-12));
    }
    SUBCASE("digital and conventional totals")
    {
        CHECK(total_power(cfg, pm, SchemeId::OptimalDigital) ==
              doctest::Approx(1.0 + 0.3 + 512.0 * 0.2).epsilon(1e-12));
        CHECK(total_power(cfg, pm, SchemeId::ConventionalPS) ==
              doctest::Approx(1.0 + 0.3 + 0.8 + 61.44).epsilon(1e-12));
    }
    SUBCASE("sub-connected uses one PS per antenna")
    {
        SystemConfig sub = cfg;
        sub.architecture = Architecture::SubConnected;
        CHECK(total_power(sub, pm, SchemeId::FDA_Sub) ==
              doctest::Approx(1.0 + 0.3 + 0.8 + 512.0 * 0.03 + 6.4).epsilon(1e-12));
    }
    SUBCASE("zero rate maps to zero efficiency")
    {
        CHECK(energy_efficiency(0.0, cfg, pm, SchemeId::FDA_Full) == 0.0);
    }
}

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
#include <doctest.h>

using namespace nfbeam;

namespace {

SystemConfig tiny_config(int n, int m = 1)
{
    SystemConfig cfg;
    cfg.n_antennas = n;
    cfg.n_subcarriers = m;
    cfg.n_users = 1;
    cfg.n_rf = 1;
    cfg.n_ttd = 1;
    cfg.cp_length = 0;
    cfg.t_max = 0.0;
    return cfg;
}

} // namespace

TEST_CASE("subcarrier frequencies")
{
    SystemConfig cfg = default_config();

    SUBCASE("center subcarrier of an odd grid")
    {
        cfg.n_subcarriers = 11;
        CHECK(cfg.subcarrier_freq(6) == 100e9);
    }
    SUBCASE("band edges of the default grid")
    {
        cfg.n_subcarriers = 10;
        CHECK(cfg.subcarrier_freq(1) == doctest::Approx(95.5e9).epsilon(1e-15));
        CHECK(cfg.subcarrier_freq(10) == doctest::Approx(104.5e9).epsilon(1e-15));
    }
    SUBCASE("exact symmetry about the center frequency")
    {
        for (int M : {1, 4, 9, 10, 33}) {
            cfg.n_subcarriers = M;
            for (int m = 1; m <= M; m++)
                CHECK(cfg.subcarrier_freq(m) + cfg.subcarrier_freq(M + 1 - m) ==
                      2.0 * cfg.center_freq);
        }
    }
    SUBCASE("out-of-range index")
    {
        CHECK_THROWS_AS((void)cfg.subcarrier_freq(0), std::out_of_range);
        CHECK_THROWS_AS((void)cfg.subcarrier_freq(cfg.n_subcarriers + 1), std::out_of_range);
    }
}

TEST_CASE("propagation distance")
{
    SUBCASE("single antenna sits at the array center")
    {
        SystemConfig cfg = tiny_config(1);
        CHECK(propagation_distance(1, 7.3, 1.1, cfg) == 7.3);
    }
    SUBCASE("broadside is symmetric about the center")
    {
        SystemConfig cfg = tiny_config(8);
        for (int n = 1; n <= 8; n++)
            CHECK(propagation_distance(n, 5.0, pi / 2, cfg) ==
                  doctest::Approx(propagation_distance(9 - n, 5.0, pi / 2, cfg)).epsilon(1e-15));
    }
    SUBCASE("extended-precision evaluation")
    {
        SystemConfig cfg = tiny_config(4);
        cfg.antenna_spacing = 1.5e-3;
        const long double r = 5.0L, d = 1.5e-3L;
        const long double chi = 1.0L - 1.0L - 1.5L; // n = 1, N = 4
        const long double expected =
            sqrtl(r * r + chi * chi * d * d - 2.0L * r * chi * d * cosl(0.25L * 3.14159265358979323846L));
        CHECK(propagation_distance(1, 5.0, pi / 4, cfg) ==
              doctest::Approx(double(expected)).epsilon(1e-14));
    }
}

TEST_CASE("array response")
{
    SUBCASE("single antenna")
    {
        SystemConfig cfg = tiny_config(1);
        const VectorXcd b = array_response(100e9, 1.0, 8.0, cfg);
        CHECK(b.size() == 1);
        CHECK(std::abs(b(0) - cxd(1.0, 0.0)) < 1e-15);
    }
    SUBCASE("broadside vector is palindromic")
    {
        SystemConfig cfg = tiny_config(6);
        const VectorXcd b = array_response(100e9, pi / 2, 6.0, cfg);
        for (int n = 0; n < 6; n++)
            CHECK(std::abs(b(n) - b(5 - n)) < 1e-12);
    }
    SUBCASE("entries carry the excess-distance phase")
    {
        SystemConfig cfg = tiny_config(4);
        const double f = 100e9, r = 5.0, theta = pi / 4;
        const VectorXcd b = array_response(f, theta, r, cfg);
        for (int n = 1; n <= 4; n++) {
            const double phase =
                -2.0 * pi * f / speed_of_light * (propagation_distance(n, r, theta, cfg) - r);
            CHECK(std::abs(b(n - 1) - std::polar(1.0, phase)) < 1e-12);
        }
    }
    SUBCASE("unit modulus everywhere")
    {
        SystemConfig cfg = tiny_config(32, 3);
        Rng rng(5);
        for (int i = 0; i < 20; i++) {
            const VectorXcd b = array_response(rng.uniform(90e9, 110e9), rng.uniform(0.1, 3.0),
                                               rng.uniform(1.0, 50.0), cfg);
            for (int n = 0; n < 32; n++)
                CHECK(std::abs(std::abs(b(n)) - 1.0) < 1e-12);
        }
    }
    SUBCASE("far-field limit reduces to the planar wavefront")
    {
        SystemConfig cfg = tiny_config(16);
        const double f = 100e9, theta = 1.1;
        const double r = 1e6 * cfg.rayleigh_distance();
        const VectorXcd b = array_response(f, theta, r, cfg);
        const double k = 2.0 * pi * f / speed_of_light;
        for (int n = 1; n <= 16; n++) {
            const double chi = (n - 1) - 0.5 * (16 - 1);
            const cxd planar = std::polar(1.0, k * chi * cfg.spacing() * std::cos(theta));
            CHECK(std::abs(std::arg(b(n - 1) * std::conj(planar))) < 1e-3);
        }
    }
}

TEST_CASE("LoS gain")
{
    SystemConfig cfg = tiny_config(1);

    SUBCASE("free-space value at one meter")
    {
        CHECK(los_gain(100e9, 1.0, cfg) ==
              doctest::Approx(speed_of_light / (4.0 * pi * 1e11)).epsilon(1e-15));
        CHECK(los_gain(100e9, 1.0, cfg) == doctest::Approx(2.3864e-4).epsilon(1e-4));
    }
    SUBCASE("inverse distance law")
    {
        CHECK(los_gain(100e9, 20.0, cfg) ==
              doctest::Approx(0.5 * los_gain(100e9, 10.0, cfg)).epsilon(1e-15));
    }
    SUBCASE("absorption factor")
    {
        SystemConfig lossy = cfg;
        lossy.k_abs = 0.02;
        CHECK(los_gain(100e9, 10.0, lossy) ==
              doctest::Approx(los_gain(100e9, 10.0, cfg) * std::exp(-0.1)).epsilon(1e-15));
    }
}

TEST_CASE("reflection coefficient")
{
    SUBCASE("matched impedance at normal incidence vanishes")
    {
        ScattererGeometry s;
        s.model = ReflectionModel::Fresnel;
        s.impedance = 376.730313668; // n_r = 1
        s.roughness = 0.0;
        s.incidence = 0.0;
        CHECK(std::abs(reflection_coeff(100e9, s)) < 1e-12);
    }
    SUBCASE("simplified mode magnitude")
    {
        ScattererGeometry s; // defaults: -15 dB
        CHECK(std::abs(reflection_coeff(100e9, s)) ==
              doctest::Approx(std::pow(10.0, -0.75)).epsilon(1e-15));
        CHECK(std::abs(reflection_coeff(100e9, s)) == doctest::Approx(0.1778).epsilon(1e-3));
    }
    SUBCASE("roughness drives the coefficient to zero")
    {
        ScattererGeometry s;
        s.model = ReflectionModel::Fresnel;
        s.impedance = 188.5;
        s.incidence = 0.3;
        s.roughness = 1.0; // huge relative to the wavelength
        CHECK(std::abs(reflection_coeff(100e9, s)) < 1e-30);
    }
    SUBCASE("nonpositive impedance is a domain error")
    {
        ScattererGeometry s;
        s.model = ReflectionModel::Fresnel;
        s.impedance = 0.0;
        CHECK_THROWS_AS((void)reflection_coeff(100e9, s), std::domain_error);
    }
}

TEST_CASE("channel construction")
{
    SUBCASE("LoS-only norm")
    {
        SystemConfig cfg = tiny_config(16, 2);
        Scenario scn;
        scn.users = {{1.2, 9.0, cfg.noise_variance()}};
        scn.scatterers = {{}};
        const ChannelTensor ch = build_channel(scn, cfg);
        for (int m = 1; m <= 2; m++)
            CHECK(ch[m - 1].col(0).norm() ==
                  doctest::Approx(std::sqrt(16.0) * los_gain(cfg.subcarrier_freq(m), 9.0, cfg))
                      .epsilon(1e-12));
    }
    SUBCASE("matches the per-path recomposition")
    {
        SystemConfig cfg = tiny_config(2, 1);
        Scenario scn;
        scn.users = {{0.9, 6.0, cfg.noise_variance()}};
        ScattererGeometry s;
        s.angle = 1.4;
        s.range = 3.0;
        s.phase = 0.77;
        scn.scatterers = {{s}};
        const ChannelTensor ch = build_channel(scn, cfg);

        const double f = cfg.subcarrier_freq(1);
        const cxd beta = std::polar(los_gain(f, 6.0, cfg), -2.0 * pi * f * 6.0 / speed_of_light);
        const cxd beta_n = reflection_coeff(f, s) * los_gain(f, 6.0, cfg) *
                           std::polar(1.0, -2.0 * pi * f * 3.0 / speed_of_light);
        const VectorXcd expect = beta * array_response(f, 0.9, 6.0, cfg).conjugate() +
                                 beta_n * array_response(f, 1.4, 3.0, cfg).conjugate();
        CHECK((ch[0].col(0) - expect).norm() < 1e-14 * expect.norm());
    }
    SUBCASE("identical users share a column")
    {
        SystemConfig cfg = tiny_config(8, 2);
        cfg.n_users = 2;
        cfg.n_rf = 2;
        Scenario scn;
        scn.users = {{1.0, 7.0, cfg.noise_variance()}, {1.0, 7.0, cfg.noise_variance()}};
        scn.scatterers = {{}, {}};
        const ChannelTensor ch = build_channel(scn, cfg);
        CHECK((ch[0].col(0) - ch[0].col(1)).norm() == 0.0);
    }
    SUBCASE("dimension mismatch is rejected")
    {
        SystemConfig cfg = tiny_config(4, 1);
        cfg.n_users = 2;
        cfg.n_rf = 2;
        Scenario scn;
        scn.users = {{1.0, 7.0, cfg.noise_variance()}};
        scn.scatterers = {{}};
        CHECK_THROWS_AS((void)build_channel(scn, cfg), std::invalid_argument);
    }
}

TEST_CASE("scenario sampling")
{
    SystemConfig cfg = default_config();

    SUBCASE("deterministic in the seed")
    {
        const Scenario a = sample_scenario(42, cfg);
        const Scenario b = sample_scenario(42, cfg);
        REQUIRE(a.users.size() == b.users.size());
        for (size_t k = 0; k < a.users.size(); k++) {
            CHECK(a.users[k].angle == b.users[k].angle);
            CHECK(a.users[k].range == b.users[k].range);
        }
        CHECK(a.to_json() == b.to_json());
    }
    SUBCASE("default population")
    {
        const Scenario scn = sample_scenario(7, cfg);
        CHECK(scn.users.size() == 4);
        for (const auto &list : scn.scatterers)
            CHECK(list.size() == 4);
    }
    SUBCASE("geometry stays in the sampling box")
    {
        for (std::uint64_t seed = 0; seed < 50; seed++) {
            const Scenario scn = sample_scenario(seed, cfg);
            for (size_t k = 0; k < scn.users.size(); k++) {
                CHECK(scn.users[k].range >= 5.0);
                CHECK(scn.users[k].range <= 15.0);
                CHECK(scn.users[k].angle >= pi / 6.0);
                CHECK(scn.users[k].angle <= 5.0 * pi / 6.0);
                for (const auto &s : scn.scatterers[k]) {
                    CHECK(s.range >= 1.0);
                    CHECK(s.range <= scn.users[k].range);
                }
            }
        }
    }
    SUBCASE("scenario JSON round-trip")
    {
        const Scenario scn = sample_scenario(3, cfg);
        const Scenario back = Scenario::from_json(scn.to_json());
        CHECK(back.to_json() == scn.to_json());
    }
}

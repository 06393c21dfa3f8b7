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

#include <cmath>
#include <doctest.h>

using namespace nfbeam;
using namespace nfbeam::baselines;

namespace {

SystemConfig bl_config(int n = 32, int nt = 4, int m = 5)
{
    SystemConfig cfg;
    cfg.n_antennas = n;
    cfg.n_subcarriers = m;
    cfg.n_users = 2;
    cfg.n_rf = 2;
    cfg.n_ttd = nt;
    cfg.cp_length = 1;
    cfg.t_max = n / (2.0 * cfg.center_freq);
    return cfg;
}

double avg_gain(const hts::AnalogChainDesign &dsg, double theta, double r,
                const SystemConfig &cfg)
{
    return hts::exact_avg_gain(theta, r, dsg, cfg);
}

} // namespace

TEST_CASE("center-frequency match")
{
    SystemConfig cfg = bl_config();
    const double theta = 1.1, r = 8.0;
    const hts::AnalogChainDesign dsg = cf_analog(theta, r, cfg);

    SUBCASE("perfect gain at the center frequency")
    {
        const VectorXcd b = hts::chain_response(cfg.center_freq, theta, r, cfg);
        const VectorXcd v = hts::chain_vector(dsg, cfg.center_freq, cfg);
        CHECK(std::abs(b.cwiseProduct(v).sum()) / cfg.n_antennas ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("unit modulus and zero delays")
    {
        CHECK(dsg.delays.cwiseAbs().maxCoeff() == 0.0);
        const VectorXcd v = hts::chain_vector(dsg, cfg.subcarrier_freq(1), cfg);
        for (Eigen::Index i = 0; i < v.size(); i++)
            CHECK(std::abs(std::abs(v(i)) - 1.0) < 1e-12);
    }
    SUBCASE("band edge trails the robust design at a tenth-band")
    {
        const hts::AnalogChainDesign rob = hts::robust_analog_design(theta, r, cfg);
        const double f_edge = cfg.subcarrier_freq(cfg.n_subcarriers);
        const VectorXcd b = hts::chain_response(f_edge, theta, r, cfg);
        const double g_cf =
            std::abs(b.cwiseProduct(hts::chain_vector(dsg, f_edge, cfg)).sum()) / cfg.n_antennas;
        const double g_rob =
            std::abs(b.cwiseProduct(hts::chain_vector(rob, f_edge, cfg)).sum()) / cfg.n_antennas;
        CHECK(g_rob > g_cf);
    }
}

TEST_CASE("mean-response and covariance matches")
{
    SystemConfig cfg = bl_config();
    const double theta = 0.9, r = 11.0;

    SUBCASE("single subcarrier degenerates to the center match")
    {
        SystemConfig narrow = cfg;
        narrow.n_subcarriers = 1;
        const hts::AnalogChainDesign cf = cf_analog(theta, r, narrow);
        const hts::AnalogChainDesign mcm = mcm_analog(theta, r, narrow);
        const hts::AnalogChainDesign mccm = mccm_analog(theta, r, narrow);
        CHECK((mcm.phases - cf.phases).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((mccm.phases - cf.phases).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("averaged designs recover wideband gain")
    {
        const double g_cf = avg_gain(cf_analog(theta, r, cfg), theta, r, cfg);
        const double g_mcm = avg_gain(mcm_analog(theta, r, cfg), theta, r, cfg);
        const double g_mccm = avg_gain(mccm_analog(theta, r, cfg), theta, r, cfg);
        const double g_rob = avg_gain(hts::robust_analog_design(theta, r, cfg), theta, r, cfg);
        CHECK(g_mcm >= g_cf - 1e-9);
        CHECK(g_mccm >= g_mcm - 1e-9);
        CHECK(g_rob >= g_mccm - 1e-9);
    }
    SUBCASE("response covariance is Hermitian positive semidefinite")
    {
        const VectorXd f = cfg.subcarrier_freqs();
        MatrixXcd R = MatrixXcd::Zero(cfg.n_antennas, cfg.n_antennas);
        for (Eigen::Index m = 0; m < f.size(); m++) {
            const VectorXcd b = hts::chain_response(f(m), theta, r, cfg);
            R += b * b.adjoint();
        }
        R /= double(f.size());
        CHECK((R - R.adjoint()).norm() < 1e-12 * R.norm());
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(R);
        CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
}

TEST_CASE("far-field delayed phase design")
{
    SystemConfig cfg = bl_config();

    SUBCASE("matches the near-field design in the far-field limit")
    {
        const double theta = 1.2;
        const double r = 1e6 * cfg.rayleigh_distance();
        const hts::AnalogChainDesign dpp = far_field_dpp(theta, cfg);
        const hts::AnalogChainDesign pnf = hts::pnf_chain_design(theta, r, cfg);
        const double g_dpp = avg_gain(dpp, theta, r, cfg);
        const double g_pnf = avg_gain(pnf, theta, r, cfg);
        CHECK(std::abs(g_dpp - g_pnf) < 1e-3);
    }
    SUBCASE("delays stay in bounds at every angle")
    {
        for (double theta : {0.3, 1.0, pi / 2, 2.2, 2.9}) {
            const hts::AnalogChainDesign dpp = far_field_dpp(theta, cfg);
            CHECK(dpp.delays.minCoeff() >= 0.0);
            CHECK(dpp.delays.maxCoeff() <= cfg.t_max);
        }
    }
    SUBCASE("near-field user favors the near-field design")
    {
        const double theta = pi / 3, r = 10.0;
        CHECK(avg_gain(far_field_dpp(theta, cfg), theta, r, cfg) <=
              avg_gain(hts::pnf_chain_design(theta, r, cfg), theta, r, cfg) + 1e-9);
    }
}

TEST_CASE("piecewise-far-field design")
{
    SUBCASE("single-element groups coincide with the near-field design")
    {
        SystemConfig cfg = bl_config(16, 16, 3);
        const double theta = 1.0, r = 7.0;
        const hts::AnalogChainDesign pdf = near_field_pdf(theta, r, cfg);
        const hts::AnalogChainDesign pnf = hts::pnf_chain_design(theta, r, cfg);
        CHECK((pdf.phases - pnf.phases).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((pdf.delays - pnf.delays).cwiseAbs().maxCoeff() < 1e-18);
    }
    SUBCASE("grouped flat phases trail the curved design")
    {
        SystemConfig cfg = bl_config(64, 4, 5);
        const double theta = pi / 3, r = 6.0;
        CHECK(avg_gain(near_field_pdf(theta, r, cfg), theta, r, cfg) <=
              avg_gain(hts::pnf_chain_design(theta, r, cfg), theta, r, cfg) + 1e-9);
    }
    SUBCASE("unit modulus and bounded delays")
    {
        SystemConfig cfg = bl_config();
        const hts::AnalogChainDesign pdf = near_field_pdf(0.8, 5.5, cfg);
        CHECK(pdf.delays.minCoeff() >= 0.0);
        CHECK(pdf.delays.maxCoeff() <= cfg.t_max);
        const VectorXcd v = hts::chain_vector(pdf, cfg.center_freq, cfg);
        for (Eigen::Index i = 0; i < v.size(); i++)
            CHECK(std::abs(std::abs(v(i)) - 1.0) < 1e-12);
    }
}

TEST_CASE("optimal digital reference")
{
    SUBCASE("single user on one carrier is matched-ratio transmission")
    {
        SystemConfig cfg = bl_config(8, 2, 1);
        cfg.n_users = 1;
        cfg.n_rf = 1;
        const Scenario scn = sample_scenario(71, cfg, 0);
        const ChannelTensor h = build_channel(scn, cfg);
        const SolverReport rep = optimal_digital(h, scn, cfg);
        const VectorXcd w = rep.digital->w[0].col(0);
        const VectorXcd hh = h[0].col(0);
        const double cosine = std::abs(hh.dot(w)) / (hh.norm() * w.norm());
        CHECK(cosine == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.digital->w[0].squaredNorm() == doctest::Approx(cfg.tx_power).epsilon(1e-12));
    }
    SUBCASE("objective trace never decreases")
    {
        SystemConfig cfg = bl_config(16, 2, 3);
        const Scenario scn = sample_scenario(72, cfg, 1);
        const ChannelTensor h = build_channel(scn, cfg);
        const SolverReport rep = optimal_digital(h, scn, cfg);
        for (size_t i = 1; i < rep.objective_trace.size(); i++)
            CHECK(rep.objective_trace[i] >= rep.objective_trace[i - 1] - 1e-9);
    }
    SUBCASE("upper-bounds the hybrid schemes on a small average")
    {
        SystemConfig cfg = bl_config(16, 2, 3);
        double digital = 0.0, hybrid_best = 0.0;
        for (std::uint64_t seed = 80; seed < 85; seed++) {
            const Scenario scn = sample_scenario(seed, cfg, 1);
            const ChannelTensor h = build_channel(scn, cfg);
            digital += optimal_digital(h, scn, cfg).spectral_efficiency;
            hybrid_best +=
                hts::hts_solve(h, scn, cfg, hts::AnalogDesignMode::Robust).spectral_efficiency;
        }
        CHECK(digital >= hybrid_best - 1e-6);
    }
}

TEST_CASE("conventional phase-shifter baseline")
{
    SystemConfig cfg = bl_config(16, 2, 3);
    const Scenario scn = sample_scenario(73, cfg, 1);
    const ChannelTensor h = build_channel(scn, cfg);
    fda::FdaOptions opt;
    opt.grid_points = 200;

    SUBCASE("delays are never touched")
    {
        const SolverReport rep = conventional_ps(h, scn, cfg, opt);
        CHECK(rep.hybrid->delays.t.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("narrowband operation matches the TTD solver")
    {
        SystemConfig narrow = cfg;
        narrow.n_subcarriers = 1;
        narrow.bandwidth = narrow.center_freq / 1000.0;
        const Scenario scn2 = sample_scenario(74, narrow, 1);
        const ChannelTensor h2 = build_channel(scn2, narrow);
        const SolverReport ps_only = conventional_ps(h2, scn2, narrow, opt);
        const SolverReport init = hts::hts_solve(h2, scn2, narrow, hts::AnalogDesignMode::PNF);
        const SolverReport ttd =
            fda::solve_fda(h2, noise_vector(scn2), narrow, *init.hybrid, opt);
        CHECK(ps_only.spectral_efficiency ==
              doctest::Approx(ttd.spectral_efficiency).epsilon(0.01));
    }
    SUBCASE("wideband operation trails the TTD solver")
    {
        const SolverReport ps_only = conventional_ps(h, scn, cfg, opt);
        const SolverReport init = hts::hts_solve(h, scn, cfg, hts::AnalogDesignMode::PNF);
        const SolverReport ttd = fda::solve_fda(h, noise_vector(scn), cfg, *init.hybrid, opt);
        CHECK(ps_only.spectral_efficiency <= ttd.spectral_efficiency + 1e-9);
    }
}

TEST_CASE("scheme dispatch")
{
    SystemConfig cfg = bl_config(16, 2, 2);
    const Scenario scn = sample_scenario(75, cfg, 1);
    const ChannelTensor h = build_channel(scn, cfg);
    fda::FdaOptions opt;
    opt.grid_points = 100;

    for (int i = 0; i <= int(SchemeId::HTS_Robust); i++) {
        const SchemeId scheme = SchemeId(i);
        const SolverReport rep = run_scheme(h, scn, cfg, scheme, opt);
        CHECK(rep.spectral_efficiency > 0.0);
        if (scheme == SchemeId::OptimalDigital)
            CHECK(rep.digital.has_value());
        else
            CHECK(rep.hybrid.has_value());
    }

    SUBCASE("scheme ids round-trip through their names")
    {
        for (int i = 0; i <= int(SchemeId::HTS_Robust); i++)
            CHECK(scheme_from_string(to_string(SchemeId(i))) == SchemeId(i));
        CHECK_THROWS_AS((void)scheme_from_string("bogus"), std::invalid_argument);
    }
}

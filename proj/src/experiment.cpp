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

#include "nfbeam/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace nfbeam {
namespace experiment {

static const char *code_version = "nfbeam 0.1.0";

void ExperimentSpec::validate() const
{
    config.validate();
    if (n_trials < 1)
        throw std::invalid_argument("n_trials must be >= 1");
    if (schemes.empty())
        throw std::invalid_argument("at least one scheme is required");
    if (sweep_variable != "none" && sweep_values.empty())
        throw std::invalid_argument("sweep requires a value list");
    for (double v : sweep_values)
        apply_sweep(config, sweep_variable, v).validate();
}

SystemConfig apply_sweep(const SystemConfig &base, const std::string &variable, double value)
{
    SystemConfig c = base;
    if (variable == "none")
        return c;
    if (variable == "tx_power") {
        c.tx_power = value;
    } else if (variable == "n_ttd") {
        c.n_ttd = int(std::lround(value));
    } else if (variable == "t_max") {
        c.t_max = value;
    } else if (variable == "bandwidth") {
        // keep P_t / sigma^2 constant across the sweep
        c.tx_power = base.tx_power * value / base.bandwidth;
        c.bandwidth = value;
    } else {
        throw std::invalid_argument("unknown sweep variable: " + variable);
    }
    return c;
}

std::vector<ResultRecord> run_experiment(const ExperimentSpec &spec, int threads)
{
    spec.validate();
    std::vector<double> values = spec.sweep_values;
    if (spec.sweep_variable == "none")
        values = {0.0};

    struct Task {
        double sweep_value;
        int trial;
        SchemeId scheme;
    };
    std::vector<Task> tasks;
    for (double v : values)
        for (int t = 0; t < spec.n_trials; t++)
            for (SchemeId s : spec.schemes)
                tasks.push_back({v, t, s});

    std::vector<ResultRecord> records(tasks.size());
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size())
                return;
            const Task &task = tasks[i];
            ResultRecord rec;
            rec.scheme = to_string(task.scheme);
            rec.seed = hash_seed(spec.master_seed, std::uint64_t(task.trial));
            rec.sweep_variable = spec.sweep_variable;
            rec.sweep_value = task.sweep_value;
            try {
                const SystemConfig cfg =
                    apply_sweep(spec.config, spec.sweep_variable, task.sweep_value);
                const Scenario scn = sample_scenario(rec.seed, cfg, spec.n_scatterers);
                const ChannelTensor h = build_channel(scn, cfg);
                const SolverReport rep =
                    baselines::run_scheme(h, scn, cfg, task.scheme, spec.solver);
                rec.spectral_efficiency = rep.spectral_efficiency;
                rec.energy_efficiency =
                    energy_efficiency(rep.spectral_efficiency,
                                      baselines::effective_config(cfg, task.scheme), spec.power,
                                      task.scheme);
                rec.iterations = rep.inner_iters;
                rec.wall_time_s = rep.wall_time_s;
                rec.converged = rep.converged;
            } catch (const std::exception &) {
                rec.converged = false;
            }
            records[i] = std::move(rec);
        }
    };

    const int nw = std::max(1, threads);
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nw; i++)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
    }

    std::sort(records.begin(), records.end(), [](const ResultRecord &a, const ResultRecord &b) {
        if (a.scheme != b.scheme)
            return a.scheme < b.scheme;
        if (a.sweep_value != b.sweep_value)
            return a.sweep_value < b.sweep_value;
        return a.seed < b.seed;
    });
    return records;
}

static std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string to_csv(const std::vector<ResultRecord> &records)
{
    std::ostringstream os;
    os << "scheme,seed,sweep_variable,sweep_value,spectral_efficiency,energy_efficiency,"
          "iterations,wall_time_s,converged\n";
    for (const auto &r : records)
        os << r.scheme << ',' << r.seed << ',' << r.sweep_variable << ','
           << fmt_double(r.sweep_value) << ',' << fmt_double(r.spectral_efficiency) << ','
           << fmt_double(r.energy_efficiency) << ',' << r.iterations << ','
           << fmt_double(r.wall_time_s) << ',' << (r.converged ? 1 : 0) << '\n';
    return os.str();
}

std::vector<ResultRecord> parse_csv(const std::string &text)
{
    std::vector<ResultRecord> out;
    std::istringstream is(text);
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string field;
        ResultRecord r;
        std::getline(ls, r.scheme, ',');
        std::getline(ls, field, ',');
        r.seed = std::stoull(field);
        std::getline(ls, r.sweep_variable, ',');
        std::getline(ls, field, ',');
        r.sweep_value = std::stod(field);
        std::getline(ls, field, ',');
        r.spectral_efficiency = std::stod(field);
        std::getline(ls, field, ',');
        r.energy_efficiency = std::stod(field);
        std::getline(ls, field, ',');
        r.iterations = std::stoi(field);
        std::getline(ls, field, ',');
        r.wall_time_s = std::stod(field);
        std::getline(ls, field, ',');
        r.converged = field == "1";
        out.push_back(std::move(r));
    }
    return out;
}

std::string ExperimentSpec::to_json() const
{
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(config.to_json());
    j["schemes"] = nlohmann::json::array();
    for (SchemeId s : schemes)
        j["schemes"].push_back(to_string(s));
    j["sweep"] = {{"variable", sweep_variable}, {"values", sweep_values}};
    j["n_trials"] = n_trials;
    j["master_seed"] = master_seed;
    j["output"] = output;
    j["n_scatterers"] = n_scatterers;
    j["power"] = {{"p_bb", power.p_bb}, {"p_rf", power.p_rf}, {"p_ps", power.p_ps},
                  {"p_ttd", power.p_ttd}};
    j["solver"] = {{"rho0", solver.rho0},
                   {"rho_bar0", solver.rho_bar0},
                   {"reduction", solver.reduction},
                   {"grid_points", solver.grid_points},
                   {"inner_tol", solver.inner_tol},
                   {"penalty_tol", solver.penalty_tol},
                   {"max_inner", solver.max_inner},
                   {"max_outer", solver.max_outer}};
    return j.dump(2);
}

ExperimentSpec ExperimentSpec::from_json(const std::string &text)
{
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentSpec spec;
    if (j.contains("config"))
        spec.config = SystemConfig::from_json(j["config"].dump());
    if (j.contains("schemes")) {
        spec.schemes.clear();
        for (const auto &s : j["schemes"])
            spec.schemes.push_back(scheme_from_string(s.get<std::string>()));
    }
    if (j.contains("sweep")) {
        spec.sweep_variable = j["sweep"].value("variable", spec.sweep_variable);
        if (j["sweep"].contains("values"))
            spec.sweep_values = j["sweep"]["values"].get<std::vector<double>>();
    }
    spec.n_trials = j.value("n_trials", spec.n_trials);
    spec.master_seed = j.value("master_seed", spec.master_seed);
    spec.output = j.value("output", spec.output);
    spec.n_scatterers = j.value("n_scatterers", spec.n_scatterers);
    if (j.contains("power")) {
        spec.power.p_bb = j["power"].value("p_bb", spec.power.p_bb);
        spec.power.p_rf = j["power"].value("p_rf", spec.power.p_rf);
        spec.power.p_ps = j["power"].value("p_ps", spec.power.p_ps);
        spec.power.p_ttd = j["power"].value("p_ttd", spec.power.p_ttd);
    }
    if (j.contains("solver")) {
        const auto &s = j["solver"];
        spec.solver.rho0 = s.value("rho0", spec.solver.rho0);
        spec.solver.rho_bar0 = s.value("rho_bar0", spec.solver.rho_bar0);
        spec.solver.reduction = s.value("reduction", spec.solver.reduction);
        spec.solver.grid_points = s.value("grid_points", spec.solver.grid_points);
        spec.solver.inner_tol = s.value("inner_tol", spec.solver.inner_tol);
        spec.solver.penalty_tol = s.value("penalty_tol", spec.solver.penalty_tol);
        spec.solver.max_inner = s.value("max_inner", spec.solver.max_inner);
        spec.solver.max_outer = s.value("max_outer", spec.solver.max_outer);
    }
    spec.validate();
    return spec;
}

std::string run_manifest(const ExperimentSpec &spec)
{
    nlohmann::json j = nlohmann::json::parse(spec.to_json());
    j["version"] = code_version;
    return j.dump(2);
}

std::string gain_map_csv(const std::string &design, double theta, double r, int points,
                         const SystemConfig &cfg)
{
    cfg.validate();
    hts::AnalogChainDesign dsg;
    if (design == "pnf")
        dsg = hts::pnf_chain_design(theta, r, cfg, 0);
    else if (design == "robust")
        dsg = hts::robust_analog_design(theta, r, cfg, 0);
    else if (design == "cf")
        dsg = baselines::cf_analog(theta, r, cfg, 0);
    else if (design == "mcm")
        dsg = baselines::mcm_analog(theta, r, cfg, 0);
    else if (design == "mccm")
        dsg = baselines::mccm_analog(theta, r, cfg, 0);
    else if (design == "dpp")
        dsg = baselines::far_field_dpp(theta, cfg, 0);
    else if (design == "pdf")
        dsg = baselines::near_field_pdf(theta, r, cfg, 0);
    else
        throw std::invalid_argument("unknown analog design: " + design);

    const double f1 = cfg.subcarrier_freq(1);
    const double fM = cfg.subcarrier_freq(cfg.n_subcarriers);
    const int n = std::max(points, 2);
    std::ostringstream os;
    os << "f_hz,theta_rad,r_m,gain\n";
    for (int i = 0; i < n; i++) {
        const double f = f1 + (fM - f1) * double(i) / double(n - 1);
        const VectorXcd b = hts::chain_response(f, theta, r, cfg, 0);
        const VectorXcd v = hts::chain_vector(dsg, f, cfg);
        const double gain = std::abs(b.cwiseProduct(v).sum()) / double(cfg.chain_span());
        os << fmt_double(f) << ',' << fmt_double(theta) << ',' << fmt_double(r) << ','
           << fmt_double(gain) << '\n';
    }
    return os.str();
}

// ---- invariant battery ----

static bool check_dense_mask(const MatrixXcd &A, const SystemConfig &cfg, std::string &detail)
{
    for (int n = 0; n < cfg.n_rf; n++)
        for (int l = 0; l < cfg.n_ttd; l++) {
            const int col = n * cfg.n_ttd + l;
            const int off = cfg.group_offset(n, l);
            for (int i = 0; i < cfg.n_antennas; i++) {
                const bool inside = i >= off && i < off + cfg.group_len();
                const double mag = std::abs(A(i, col));
                if (inside && std::abs(mag - 1.0) > 1e-12) {
                    detail = "non-unit entry inside the mask";
                    return false;
                }
                if (!inside && mag != 0.0) {
                    detail = "nonzero entry outside the mask";
                    return false;
                }
            }
        }
    return true;
}

std::vector<CheckResult> run_checks(bool inject_mask_fault)
{
    std::vector<CheckResult> out;
    auto push = [&](const std::string &name, bool ok, const std::string &detail) {
        out.push_back({name, ok, detail});
    };

    {
        const int nt10 = hts::smallest_nt_for_delta(512, 0.1, 0.8);
        push("delta-threshold-b10ghz", nt10 == 36, "smallest N_T = " + std::to_string(nt10));
        const int nt20 = hts::smallest_nt_for_delta(512, 0.2, 0.8);
        push("delta-threshold-b20ghz", nt20 == 71, "smallest N_T = " + std::to_string(nt20));
        const int nt30 = hts::smallest_nt_for_delta(512, 0.3, 0.8);
        push("delta-threshold-b30ghz", nt30 == 105, "smallest N_T = " + std::to_string(nt30));
    }

    {
        // closed-form delays align every subcarrier term exactly
        SystemConfig cfg = desk_config();
        cfg.t_max = 2.0 * hts::prop2_delay_bound(cfg);
        Rng rng(11);
        bool ok = true;
        std::string detail;
        for (int i = 0; i < 20 && ok; i++) {
            const double theta = rng.uniform(pi / 6.0, 5.0 * pi / 6.0);
            const double r = rng.uniform(5.0, 15.0);
            const hts::PnfGeometry g = hts::pnf_geometry(theta, r, cfg);
            const VectorXd t = hts::pnf_ttd_closed_form(g, cfg);
            const double target = double(cfg.n_subcarriers) * cfg.n_ttd;
            const double obj = hts::pnf_delay_objective(g, t, cfg);
            if (std::abs(obj - target) > 1e-9 * target || t.minCoeff() < 0.0 ||
                t.maxCoeff() > cfg.t_max) {
                ok = false;
                detail = "objective " + std::to_string(obj) + " vs " + std::to_string(target);
            }
        }
        push("closed-form-delay-alignment", ok, detail);
    }

    {
        // piecewise approximation error is range-independent at grazing angles
        SystemConfig cfg = default_config();
        cfg.n_antennas = 256;
        cfg.n_ttd = 16;
        cfg.n_subcarriers = 256;
        const double fM = cfg.subcarrier_freq(cfg.n_subcarriers);
        double lo = 2.0, hi = 0.0;
        for (double r : {5.0, 10.0, 15.0}) {
            const VectorXcd b = array_response(fM, 1e-6, r, cfg);
            const VectorXcd bh = hts::pnf_approx_response(fM, 1e-6, r, cfg);
            const double gain = std::abs(b.conjugate().cwiseProduct(bh).sum()) / cfg.n_antennas;
            lo = std::min(lo, gain);
            hi = std::max(hi, gain);
        }
        const double delta = hts::delta_criterion(double(cfg.n_ttd) / cfg.n_antennas,
                                                  cfg.bandwidth / cfg.center_freq);
        const bool ok = (hi - lo) < 1e-9 && std::abs(hi - delta) < 1e-2;
        push("grazing-angle-gain-consistency", ok,
             "spread " + std::to_string(hi - lo) + ", delta gap " + std::to_string(hi - delta));
    }

    {
        // mask / unit-modulus / delay-bound invariants on solver output
        SystemConfig cfg = desk_config();
        cfg.n_antennas = 16;
        cfg.n_subcarriers = 3;
        cfg.t_max = cfg.n_antennas / (2.0 * cfg.center_freq);
        const Scenario scn = sample_scenario(7, cfg, 2);
        const ChannelTensor h = build_channel(scn, cfg);
        SolverReport rep = hts::hts_solve(h, scn, cfg, hts::AnalogDesignMode::Robust);
        MatrixXcd A = rep.hybrid->ps.dense_matrix(cfg);
        if (inject_mask_fault)
            A(cfg.n_antennas - 1, 0) = cxd(0.5, 0.0);
        std::string detail;
        const bool mask_ok = check_dense_mask(A, cfg, detail);
        push("analog-mask-and-modulus", mask_ok, detail);
        push("delay-bounds", rep.hybrid->delays.within_bounds(cfg, 1e-15), "");
        HybridBeamformer scaled = power_rescale(*rep.hybrid, cfg);
        bool power_ok = true;
        for (int m = 1; m <= cfg.n_subcarriers; m++)
            power_ok = power_ok && std::abs(effective_precoder(scaled, m, cfg).squaredNorm() -
                                            cfg.tx_power) < 1e-10 * cfg.tx_power;
        push("per-subcarrier-power", power_ok, "");
    }

    {
        // grid search agrees with a much finer grid on a small instance
        SystemConfig cfg = desk_config();
        cfg.n_antennas = 8;
        cfg.n_rf = 2;
        cfg.n_ttd = 2;
        cfg.n_users = 2;
        cfg.n_subcarriers = 3;
        cfg.t_max = cfg.n_antennas / (2.0 * cfg.center_freq);
        Rng rng(3);
        MatStack V(3);
        for (auto &v : V) {
            v.resize(cfg.n_antennas, cfg.n_rf);
            for (Eigen::Index i = 0; i < v.size(); i++)
                v.data()[i] = cxd(rng.normal(), rng.normal());
        }
        PhaseNetwork ps = PhaseNetwork::zeros(cfg);
        const DelayNetwork coarse = fda::update_ttd_full(V, ps, cfg, 1000);
        const DelayNetwork fine = fda::update_ttd_full(V, ps, cfg, 100000);
        const double step = cfg.t_max / 999.0;
        const bool ok = ((coarse.t - fine.t).cwiseAbs().maxCoeff() <= step + 1e-18);
        push("delay-grid-refinement", ok, "");
    }

    return out;
}

} // namespace experiment
} // namespace nfbeam

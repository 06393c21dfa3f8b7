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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

using namespace nfbeam;

namespace {

std::string read_file(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_file(const std::string &path, const std::string &content)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write " + path);
    f << content;
}

// Applies "a.b.c=value" overrides to a JSON document; values parse as JSON
// literals and fall back to strings.
void apply_overrides(nlohmann::json &j, const std::vector<std::string> &sets)
{
    for (const auto &s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("override must look like path.to.field=value: " + s);
        const std::string path = s.substr(0, eq);
        const std::string value = s.substr(eq + 1);
        nlohmann::json *node = &j;
        std::istringstream ps(path);
        std::string key, prev;
        std::vector<std::string> keys;
        while (std::getline(ps, key, '.'))
            keys.push_back(key);
        for (size_t i = 0; i + 1 < keys.size(); i++)
            node = &(*node)[keys[i]];
        nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
        (*node)[keys.back()] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"near-field wideband TTD hybrid beamforming simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path, scheme_list, set_preset = "full";
    std::vector<std::string> overrides;
    std::uint64_t seed = 1;
    int threads = 1;

    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--config", config_path, "JSON configuration file");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--out", out_path, "output CSV path");
        cmd->add_option("--threads", threads, "worker threads");
        cmd->add_option("--scheme", scheme_list, "comma-separated scheme ids");
        cmd->add_option("--set", overrides, "dot-path JSON overrides (a.b=value)");
        cmd->add_option("--preset", set_preset, "base preset when --config is absent")
            ->check(CLI::IsMember({"full", "desk"}));
    };

    CLI::App *simulate = app.add_subcommand("simulate", "run schemes on one random scenario");
    add_common(simulate);
    std::string trace_prefix;
    simulate->add_option("--trace", trace_prefix,
                         "write per-scheme solver traces to <prefix>.<scheme>.csv");

    CLI::App *sweep = app.add_subcommand("sweep", "run a Monte Carlo sweep experiment");
    add_common(sweep);

    CLI::App *gainmap = app.add_subcommand("gain-map", "export a normalized array gain map");
    double gm_theta = pi / 4.0, gm_range = 10.0;
    int gm_points = 201;
    std::string gm_design = "robust";
    add_common(gainmap);
    gainmap->add_option("--design", gm_design, "pnf|robust|cf|mcm|mccm|dpp|pdf");
    gainmap->add_option("--theta", gm_theta, "design angle, radians");
    gainmap->add_option("--range", gm_range, "design range, meters");
    gainmap->add_option("--points", gm_points, "frequency grid points");

    CLI::App *check = app.add_subcommand("check", "run the invariant battery");

    CLI11_PARSE(app, argc, argv);

    try {
        auto load_experiment = [&]() {
            nlohmann::json j;
            if (!config_path.empty())
                j = nlohmann::json::parse(read_file(config_path));
            if (!j.contains("config"))
                j["config"] = nlohmann::json::parse(
                    (set_preset == "desk" ? desk_config() : default_config()).to_json());
            apply_overrides(j, overrides);
            experiment::ExperimentSpec spec = experiment::ExperimentSpec::from_json(j.dump());
            if (simulate->count("--seed") > 0 || sweep->count("--seed") > 0)
                spec.master_seed = seed;
            if (!scheme_list.empty()) {
                spec.schemes.clear();
                std::istringstream ss(scheme_list);
                std::string item;
                while (std::getline(ss, item, ','))
                    spec.schemes.push_back(scheme_from_string(item));
            }
            if (!out_path.empty())
                spec.output = out_path;
            return spec;
        };

        if (simulate->parsed() || sweep->parsed()) {
            experiment::ExperimentSpec spec = load_experiment();
            if (simulate->parsed()) {
                spec.sweep_variable = "none";
                spec.sweep_values.clear();
                spec.n_trials = 1;
            }
            const auto records = experiment::run_experiment(spec, threads);
            std::printf("%-18s %-12s %14s %14s %6s %10s\n", "scheme", "sweep", "se[bit/s/Hz]",
                        "ee[bit/s/Hz/W]", "conv", "time[s]");
            for (const auto &r : records)
                std::printf("%-18s %-12g %14.6f %14.6f %6d %10.3f\n", r.scheme.c_str(),
                            r.sweep_value, r.spectral_efficiency, r.energy_efficiency,
                            int(r.converged), r.wall_time_s);
            if (!spec.output.empty()) {
                write_file(spec.output, experiment::to_csv(records));
                write_file(spec.output + ".manifest.json", experiment::run_manifest(spec));
                std::printf("wrote %s\n", spec.output.c_str());
            }
            if (simulate->parsed() && !trace_prefix.empty()) {
                const std::uint64_t seed = hash_seed(spec.master_seed, 0);
                const Scenario scn = sample_scenario(seed, spec.config, spec.n_scatterers);
                const ChannelTensor h = build_channel(scn, spec.config);
                for (SchemeId scheme : spec.schemes) {
                    const SolverReport rep =
                        baselines::run_scheme(h, scn, spec.config, scheme, spec.solver);
                    const std::string path = trace_prefix + "." + to_string(scheme) + ".csv";
                    write_file(path, fda::trace_csv(rep));
                    std::printf("wrote %s\n", path.c_str());
                }
            }
            return 0;
        }

        if (gainmap->parsed()) {
            SystemConfig cfg = set_preset == "desk" ? desk_config() : default_config();
            if (!config_path.empty()) {
                nlohmann::json j = nlohmann::json::parse(read_file(config_path));
                if (j.contains("config"))
                    j = j["config"];
                apply_overrides(j, overrides);
                cfg = SystemConfig::from_json(j.dump());
            }
            const std::string csv =
                experiment::gain_map_csv(gm_design, gm_theta, gm_range, gm_points, cfg);
            if (out_path.empty())
                std::fputs(csv.c_str(), stdout);
            else
                write_file(out_path, csv);
            return 0;
        }

        if (check->parsed()) {
            const auto results = experiment::run_checks();
            bool all = true;
            for (const auto &r : results) {
                std::printf("%-36s %s%s%s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                            r.detail.empty() ? "" : "  ", r.detail.c_str());
                all = all && r.passed;
            }
            std::printf("%zu checks, %s\n", results.size(), all ? "all passed" : "FAILURES");
            return all ? 0 : 1;
        }
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}

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

#include "nfbeam/scenario.hpp"

#include <stdexcept>

#include <json.hpp>

namespace nfbeam {

void Scenario::validate(const SystemConfig &cfg) const
{
    if (int(users.size()) != cfg.n_users)
        throw std::invalid_argument("scenario user count does not match config");
    if (scatterers.size() != users.size())
        throw std::invalid_argument("scenario needs one scatterer list per user");
    for (const auto &u : users) {
        if (u.range <= 0.0)
            throw std::invalid_argument("user range must be positive");
        if (u.noise_var <= 0.0)
            throw std::invalid_argument("user noise variance must be positive");
    }
    for (const auto &list : scatterers)
        for (const auto &s : list) {
            if (s.range <= 0.0)
                throw std::invalid_argument("scatterer range must be positive");
            if (s.incidence < 0.0 || s.incidence >= 0.5 * pi)
                throw std::invalid_argument("incidence angle must lie in [0, pi/2)");
        }
}

Scenario sample_scenario(std::uint64_t seed, const SystemConfig &cfg, int n_scatterers)
{
    Rng rng(seed);
    Scenario scn;
    scn.rng_seed = seed;
    scn.users.resize(size_t(cfg.n_users));
    scn.scatterers.resize(size_t(cfg.n_users));
    const double sigma2 = cfg.noise_variance();
    for (int k = 0; k < cfg.n_users; k++) {
        UserGeometry &u = scn.users[size_t(k)];
        u.range = rng.uniform(5.0, 15.0);
        u.angle = rng.uniform(pi / 6.0, 5.0 * pi / 6.0);
        u.noise_var = sigma2;
        auto &list = scn.scatterers[size_t(k)];
        list.resize(size_t(n_scatterers));
        for (auto &s : list) {
            s.range = rng.uniform(1.0, u.range);
            s.angle = rng.uniform(pi / 6.0, 5.0 * pi / 6.0);
            s.incidence = rng.uniform(0.0, 0.5 * pi);
            s.phase = rng.uniform(0.0, 2.0 * pi);
            s.model = ReflectionModel::Simplified;
        }
    }
    return scn;
}

static nlohmann::json scatterer_to_json(const ScattererGeometry &s)
{
    nlohmann::json j;
    j["angle"] = s.angle;
    j["range"] = s.range;
    j["incidence"] = s.incidence;
    j["impedance"] = s.impedance;
    j["roughness"] = s.roughness;
    j["avg_reflection_db"] = s.avg_reflection_db;
    j["phase"] = s.phase;
    j["model"] = s.model == ReflectionModel::Simplified ? "simplified" : "fresnel";
    return j;
}

static ScattererGeometry scatterer_from_json(const nlohmann::json &j)
{
    ScattererGeometry s;
    s.angle = j.value("angle", s.angle);
    s.range = j.value("range", s.range);
    s.incidence = j.value("incidence", s.incidence);
    s.impedance = j.value("impedance", s.impedance);
    s.roughness = j.value("roughness", s.roughness);
    s.avg_reflection_db = j.value("avg_reflection_db", s.avg_reflection_db);
    s.phase = j.value("phase", s.phase);
    if (j.contains("model"))
        s.model = j["model"].get<std::string>() == "fresnel" ? ReflectionModel::Fresnel
                                                             : ReflectionModel::Simplified;
    return s;
}

std::string Scenario::to_json() const
{
    nlohmann::json j;
    j["rng_seed"] = rng_seed;
    j["users"] = nlohmann::json::array();
    for (const auto &u : users)
        j["users"].push_back({{"angle", u.angle}, {"range", u.range}, {"noise_var", u.noise_var}});
    j["scatterers"] = nlohmann::json::array();
    for (const auto &list : scatterers) {
        nlohmann::json jl = nlohmann::json::array();
        for (const auto &s : list)
            jl.push_back(scatterer_to_json(s));
        j["scatterers"].push_back(jl);
    }
    return j.dump(2);
}

Scenario Scenario::from_json(const std::string &text)
{
    nlohmann::json j = nlohmann::json::parse(text);
    Scenario scn;
    scn.rng_seed = j.value("rng_seed", std::uint64_t(0));
    for (const auto &ju : j.at("users")) {
        UserGeometry u;
        u.angle = ju.value("angle", u.angle);
        u.range = ju.value("range", u.range);
        u.noise_var = ju.value("noise_var", u.noise_var);
        scn.users.push_back(u);
    }
    for (const auto &jl : j.at("scatterers")) {
        std::vector<ScattererGeometry> list;
        for (const auto &js : jl)
            list.push_back(scatterer_from_json(js));
        scn.scatterers.push_back(std::move(list));
    }
    return scn;
}

} // namespace nfbeam

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

#include "nfbeam/config.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace nfbeam {

std::string to_string(Architecture a)
{
    return a == Architecture::FullyConnected ? "fully_connected" : "sub_connected";
}

Architecture architecture_from_string(const std::string &s)
{
    if (s == "fully_connected")
        return Architecture::FullyConnected;
    if (s == "sub_connected")
        return Architecture::SubConnected;
    throw std::invalid_argument("Unknown architecture: " + s);
}

void SystemConfig::validate() const
{
    if (n_antennas < 1)
        throw std::invalid_argument("n_antennas must be positive");
    if (n_subcarriers < 1)
        throw std::invalid_argument("n_subcarriers must be >= 1");
    if (cp_length < 0)
        throw std::invalid_argument("cp_length must be nonnegative");
    if (center_freq <= 0.0 || bandwidth < 0.0)
        throw std::invalid_argument("center_freq must be positive and bandwidth nonnegative");
    if (bandwidth >= 2.0 * center_freq)
        throw std::invalid_argument("bandwidth must be below 2 * center_freq");
    if (n_users < 1 || n_rf < n_users || n_rf > n_antennas)
        throw std::invalid_argument("need K <= N_RF <= N");
    if (n_ttd < 1)
        throw std::invalid_argument("n_ttd must be positive");
    if (t_max < 0.0)
        throw std::invalid_argument("t_max must be nonnegative");
    if (tx_power <= 0.0)
        throw std::invalid_argument("tx_power must be positive");
    if (k_abs < 0.0)
        throw std::invalid_argument("k_abs must be nonnegative");
    if (architecture == Architecture::FullyConnected) {
        if (n_antennas % n_ttd != 0)
            throw std::invalid_argument("fully-connected requires N divisible by N_T");
    } else {
        if (n_antennas % n_rf != 0)
            throw std::invalid_argument("sub-connected requires N divisible by N_RF");
        if ((n_antennas / n_rf) % n_ttd != 0)
            throw std::invalid_argument("sub-connected requires N/N_RF divisible by N_T");
    }
}

double SystemConfig::subcarrier_freq(int m) const
{
    if (m < 1 || m > n_subcarriers)
        throw std::out_of_range("subcarrier index out of range");
    return center_freq + bandwidth * double(2 * m - 1 - n_subcarriers) / double(2 * n_subcarriers);
}

VectorXd SystemConfig::subcarrier_freqs() const
{
    VectorXd f(n_subcarriers);
    for (int m = 1; m <= n_subcarriers; m++)
        f(m - 1) = subcarrier_freq(m);
    return f;
}

double SystemConfig::noise_variance() const
{
    // noise_density is dBm/Hz; convert to W/Hz and multiply by the
    // per-subcarrier bandwidth B/M
    double watts_per_hz = std::pow(10.0, (noise_density - 30.0) / 10.0);
    return watts_per_hz * bandwidth / double(n_subcarriers);
}

std::string SystemConfig::to_json() const
{
    nlohmann::json j;
    j["n_antennas"] = n_antennas;
    j["antenna_spacing"] = spacing();
    j["center_freq"] = center_freq;
    j["bandwidth"] = bandwidth;
    j["n_subcarriers"] = n_subcarriers;
    j["cp_length"] = cp_length;
    j["n_users"] = n_users;
    j["n_rf"] = n_rf;
    j["n_ttd"] = n_ttd;
    j["t_max"] = t_max;
    j["tx_power"] = tx_power;
    j["noise_density"] = noise_density;
    j["architecture"] = to_string(architecture);
    j["k_abs"] = k_abs;
    j["ttd_power_convention"] =
        ttd_power_convention == TtdPowerConvention::PerChain ? "per_chain" : "per_antenna";
    return j.dump(2);
}

SystemConfig SystemConfig::from_json(const std::string &text)
{
    nlohmann::json j = nlohmann::json::parse(text);
    SystemConfig c;
    c.n_antennas = j.value("n_antennas", c.n_antennas);
    c.antenna_spacing = j.value("antenna_spacing", 0.0);
    c.center_freq = j.value("center_freq", c.center_freq);
    c.bandwidth = j.value("bandwidth", c.bandwidth);
    c.n_subcarriers = j.value("n_subcarriers", c.n_subcarriers);
    c.cp_length = j.value("cp_length", c.cp_length);
    c.n_users = j.value("n_users", c.n_users);
    c.n_rf = j.value("n_rf", c.n_rf);
    c.n_ttd = j.value("n_ttd", c.n_ttd);
    c.t_max = j.value("t_max", c.t_max);
    c.tx_power = j.value("tx_power", c.tx_power);
    c.noise_density = j.value("noise_density", c.noise_density);
    if (j.contains("architecture"))
        c.architecture = architecture_from_string(j["architecture"].get<std::string>());
    c.k_abs = j.value("k_abs", c.k_abs);
    if (j.contains("ttd_power_convention"))
        c.ttd_power_convention = j["ttd_power_convention"].get<std::string>() == "per_antenna"
                                     ? TtdPowerConvention::PerAntenna
                                     : TtdPowerConvention::PerChain;
    c.validate();
    return c;
}

SystemConfig default_config()
{
    SystemConfig c;
    c.t_max = c.n_antennas / (2.0 * c.center_freq);
    return c;
}

SystemConfig desk_config()
{
    SystemConfig c;
    c.n_antennas = 64;
    c.n_subcarriers = 5;
    c.cp_length = 2;
    c.n_users = 2;
    c.n_rf = 2;
    c.n_ttd = 4;
    c.t_max = c.n_antennas / (2.0 * c.center_freq);
    return c;
}

} // namespace nfbeam

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

#ifndef NFBEAM_CONFIG_HPP
#define NFBEAM_CONFIG_HPP

#include "common.hpp"

#include <string>

namespace nfbeam {

enum class Architecture { FullyConnected, SubConnected };

std::string to_string(Architecture a);
Architecture architecture_from_string(const std::string &s);

// Convention for counting TTDs in the power model. PerChain counts the
// N_RF * N_T delay elements the architecture actually instantiates;
// PerAntenna uses the N * N_T product some power budgets quote instead.
enum class TtdPowerConvention { PerChain, PerAntenna };

// All physical and architectural constants of one simulated system.
// Frequencies in Hz, lengths in m, delays in s, powers in W.
struct SystemConfig {
    int n_antennas = 512;           // N
    double antenna_spacing = 0.0;   // d; 0 means "use half center-wavelength"
    double center_freq = 100e9;     // f_c
    double bandwidth = 10e9;        // B
    int n_subcarriers = 10;         // M
    int cp_length = 4;              // L_CP
    int n_users = 4;                // K
    int n_rf = 4;                   // N_RF
    int n_ttd = 16;                 // N_T per RF chain
    double t_max = 2.56e-9;         // TTD delay range
    double tx_power = 0.01;         // P_t per subcarrier
    double noise_density = -174.0;  // dBm/Hz
    Architecture architecture = Architecture::FullyConnected;
    double k_abs = 0.0;             // medium absorption, 1/m (constant over f)
    TtdPowerConvention ttd_power_convention = TtdPowerConvention::PerChain;

    // Throws std::invalid_argument when a structural invariant is violated:
    // divisibility of N by the TTD grouping, K <= N_RF <= N, B < 2 f_c, ...
    void validate() const;

    double spacing() const
    {
        return antenna_spacing > 0.0 ? antenna_spacing : speed_of_light / (2.0 * center_freq);
    }
    double wavelength_c() const { return speed_of_light / center_freq; }
    double aperture() const { return (n_antennas - 1) * spacing(); }
    double rayleigh_distance() const { return 2.0 * aperture() * aperture() / wavelength_c(); }

    // f_m = f_c + B (2m - 1 - M) / (2M), m in 1..M
    double subcarrier_freq(int m) const;
    VectorXd subcarrier_freqs() const;

    // per-subcarrier noise power in W derived from the density in dBm/Hz
    double noise_variance() const;

    // ---- analog-network geometry helpers ----
    // Number of antennas driven by one RF chain.
    int chain_span() const
    {
        return architecture == Architecture::FullyConnected ? n_antennas : n_antennas / n_rf;
    }
    // Number of antennas behind one TTD (one PS group).
    int group_len() const { return chain_span() / n_ttd; }
    // First global antenna row of group (chain n, ttd l), 0-based.
    int group_offset(int n, int l) const
    {
        int base = architecture == Architecture::FullyConnected ? 0 : n * chain_span();
        return base + l * group_len();
    }
    // Center of group (n, l) in units of antenna spacing, relative to the
    // array center (chi coordinate of the group midpoint).
    double group_center(int n, int l) const
    {
        return group_offset(n, l) + 0.5 * (group_len() - 1) - 0.5 * (n_antennas - 1);
    }

    std::string to_json() const;
    static SystemConfig from_json(const std::string &text);
};

// Full-scale defaults (the constructor values).
SystemConfig default_config();

// Reduced problem size used by tests and the trend experiments.
SystemConfig desk_config();

// Per-component power draw of the beamforming hardware, in W.
struct PowerModel {
    double p_bb = 0.3;  // baseband processing
    double p_rf = 0.2;  // one RF chain
    double p_ps = 0.03; // one phase shifter
    double p_ttd = 0.1; // one true-time delayer
};

} // namespace nfbeam

#endif

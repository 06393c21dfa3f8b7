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

#ifndef NFBEAM_BEAMFORMER_HPP
#define NFBEAM_BEAMFORMER_HPP

#include "config.hpp"

#include <string>
#include <vector>

namespace nfbeam {

// Phase-shifter network. Phases are stored in radians per RF chain, one entry
// per driven antenna, so the realized entries are unit-modulus by
// construction and everything outside the connectivity mask is exactly zero.
struct PhaseNetwork {
    Architecture architecture = Architecture::FullyConnected;
    std::vector<VectorXd> chain_phases; // n_rf vectors of length chain_span

    static PhaseNetwork zeros(const SystemConfig &cfg);

    int n_chains() const { return int(chain_phases.size()); }

    // Phase group driven by TTD l of chain n (length group_len).
    Eigen::VectorBlock<VectorXd> group(int n, int l, const SystemConfig &cfg)
    {
        return chain_phases[size_t(n)].segment(l * cfg.group_len(), cfg.group_len());
    }
    Eigen::VectorBlock<const VectorXd> group(int n, int l, const SystemConfig &cfg) const
    {
        return chain_phases[size_t(n)].segment(l * cfg.group_len(), cfg.group_len());
    }

    // Materialized unit-modulus PS vector a_{n,l}.
    VectorXcd group_vector(int n, int l, const SystemConfig &cfg) const;

    // Dense N x (N_T * N_RF) PS matrix with the architecture's zero pattern
    // (column (n, l) at index n * N_T + l). Intended for oracle tests.
    MatrixXcd dense_matrix(const SystemConfig &cfg) const;
};

// TTD delays, N_RF x N_T, seconds, each within [0, t_max].
struct DelayNetwork {
    MatrixXd t;

    static DelayNetwork zeros(const SystemConfig &cfg);

    bool within_bounds(const SystemConfig &cfg, double slack = 0.0) const;
};

// Per-subcarrier baseband precoders, N_RF x K each.
struct DigitalPrecoder {
    std::vector<MatrixXcd> d;

    static DigitalPrecoder zeros(const SystemConfig &cfg);

    MatrixXcd &operator[](int m) { return d[size_t(m)]; }
    const MatrixXcd &operator[](int m) const { return d[size_t(m)]; }
};

struct HybridBeamformer {
    Architecture architecture = Architecture::FullyConnected;
    PhaseNetwork ps;
    DelayNetwork delays;
    DigitalPrecoder digital;

    static HybridBeamformer zeros(const SystemConfig &cfg);

    std::string to_json() const;
    static HybridBeamformer from_json(const std::string &text);
};

// Unconstrained fully-digital precoders, N x K per subcarrier.
struct FullyDigitalPrecoder {
    std::vector<MatrixXcd> w;

    MatrixXcd &operator[](int m) { return w[size_t(m)]; }
    const MatrixXcd &operator[](int m) const { return w[size_t(m)]; }
    int n_subcarriers() const { return int(w.size()); }
};

// Frequency response of the TTD network at frequency f: block-diagonal
// (N_T * N_RF) x N_RF matrix whose block n is the column exp(-j 2 pi f t_n).
MatrixXcd ttd_response(const DelayNetwork &delays, double f, const SystemConfig &cfg);

// Combined analog beamformer A * T(f), N x N_RF. Fully-connected results are
// dense; sub-connected results are block-diagonal with chain_span-row blocks.
MatrixXcd assemble_analog(const PhaseNetwork &ps, const DelayNetwork &delays, double f,
                          const SystemConfig &cfg);

// Column n of assemble_analog without forming the full matrix.
VectorXcd analog_column(const PhaseNetwork &ps, const DelayNetwork &delays, double f, int n,
                        const SystemConfig &cfg);

// A * T_m * D_m for subcarrier m (1-based).
MatrixXcd effective_precoder(const HybridBeamformer &hb, int m, const SystemConfig &cfg);

// Scales every D_m so that ||A T_m D_m||_F^2 equals the per-subcarrier power
// budget exactly. Throws std::domain_error on a zero-norm effective precoder.
HybridBeamformer power_rescale(const HybridBeamformer &hb, const SystemConfig &cfg);

} // namespace nfbeam

#endif

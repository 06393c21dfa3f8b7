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

#ifndef NFBEAM_METRICS_HPP
#define NFBEAM_METRICS_HPP

#include "beamformer.hpp"
#include "channel.hpp"

namespace nfbeam {

// Scheme tags used for result records and the power model. The FDA/HTS
// entries are the proposed designs, the rest are reference schemes.
enum class SchemeId {
    OptimalDigital,
    ConventionalPS,
    CF,
    MCM,
    MCCM,
    FarFieldDPP,
    NearFieldPDF,
    FDA_Full,
    FDA_Sub,
    HTS_PNF,
    HTS_Robust,
};

std::string to_string(SchemeId s);
SchemeId scheme_from_string(const std::string &s);

// Per-user noise powers; entry k applies to user k on every subcarrier.
VectorXd noise_vector(const Scenario &scn);

// SINR of user k on subcarrier m (both 1-based) under the hybrid beamformer.
double sinr(const ChannelTensor &h, const HybridBeamformer &hb, int m, int k, double noise_var,
            const SystemConfig &cfg);

// Power-normalized SINR of the hybrid beamformer: the noise term is loaded
// with ||A T_m D_m||_F^2 / P_t, making the value invariant to scaling D_m.
double modified_sinr_hybrid(const ChannelTensor &h, const HybridBeamformer &hb, int m, int k,
                            double noise_var, const SystemConfig &cfg);

// Same normalization for an unconstrained fully-digital precoder W_m.
double modified_sinr_hat(const MatrixXcd &H_m, const MatrixXcd &W_m, int k, double noise_var,
                         double tx_power);

struct RateReport {
    MatrixXd rates; // M x K, bit/s/Hz before the cyclic-prefix factor
    double spectral_efficiency = 0.0;
    double energy_efficiency = 0.0; // filled when a PowerModel is supplied
};

double spectral_efficiency(const ChannelTensor &h, const HybridBeamformer &hb,
                           const VectorXd &noise, const SystemConfig &cfg);

// Spectral efficiency of an unconstrained digital precoder evaluated with the
// power-normalized SINR (equals the true SINR once ||W_m||_F^2 = P_t).
double spectral_efficiency_digital(const ChannelTensor &h, const FullyDigitalPrecoder &W,
                                   const VectorXd &noise, const SystemConfig &cfg);

RateReport rate_report(const ChannelTensor &h, const HybridBeamformer &hb, const VectorXd &noise,
                       const SystemConfig &cfg);
RateReport rate_report(const ChannelTensor &h, const HybridBeamformer &hb, const VectorXd &noise,
                       const SystemConfig &cfg, const PowerModel &pm, SchemeId scheme);

// |b(f, theta, r)^T v| / N for a stacked unit-modulus analog vector v.
double normalized_array_gain(double f, double theta, double r, const VectorXcd &v,
                             const SystemConfig &cfg);

// Total power draw of the architecture a scheme runs on.
double total_power(const SystemConfig &cfg, const PowerModel &pm, SchemeId scheme);

// Spectral efficiency per watt.
double energy_efficiency(double se, const SystemConfig &cfg, const PowerModel &pm,
                         SchemeId scheme);

} // namespace nfbeam

#endif

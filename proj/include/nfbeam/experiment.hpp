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

#ifndef NFBEAM_EXPERIMENT_HPP
#define NFBEAM_EXPERIMENT_HPP

#include "baselines.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nfbeam {
namespace experiment {

// Monte Carlo protocol: a base configuration, the schemes to compare, an
// optional one-variable sweep, and the trial budget.
struct ExperimentSpec {
    SystemConfig config;
    std::vector<SchemeId> schemes{SchemeId::FDA_Full};
    std::string sweep_variable = "none"; // none|tx_power|n_ttd|t_max|bandwidth
    std::vector<double> sweep_values;
    int n_trials = 1;
    std::uint64_t master_seed = 1;
    std::string output = "results.csv";
    int n_scatterers = 4;
    PowerModel power;
    fda::FdaOptions solver;

    void validate() const;
    std::string to_json() const;
    static ExperimentSpec from_json(const std::string &text);
};

struct ResultRecord {
    std::string scheme;
    std::uint64_t seed = 0;
    std::string sweep_variable = "none";
    double sweep_value = 0.0;
    double spectral_efficiency = 0.0;
    double energy_efficiency = 0.0;
    int iterations = 0;
    double wall_time_s = 0.0;
    bool converged = false;
};

// Applies one sweep value to the base configuration. Sweeping the bandwidth
// co-scales the transmit power so P_t / sigma^2 stays constant.
SystemConfig apply_sweep(const SystemConfig &base, const std::string &variable, double value);

// Runs every (sweep value, trial, scheme) combination. Per-trial seeds come
// from a stable hash of (master_seed, trial) so earlier trials never change
// when the budget grows. Failures are recorded with converged = false.
// Records are sorted by (scheme, sweep value, seed).
std::vector<ResultRecord> run_experiment(const ExperimentSpec &spec, int threads = 1);

std::string to_csv(const std::vector<ResultRecord> &records);
std::vector<ResultRecord> parse_csv(const std::string &text);

// Config echo + code version, written next to the CSV.
std::string run_manifest(const ExperimentSpec &spec);

// Normalized array gain of one analog design over a band grid for a fixed
// design point; rows are "f_hz,theta_rad,r_m,gain".
std::string gain_map_csv(const std::string &design, double theta, double r, int points,
                         const SystemConfig &cfg);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Invariant battery behind the `check` subcommand. The fault-injection hook
// corrupts a connectivity mask to prove the battery can fail.
std::vector<CheckResult> run_checks(bool inject_mask_fault = false);

} // namespace experiment
} // namespace nfbeam

#endif

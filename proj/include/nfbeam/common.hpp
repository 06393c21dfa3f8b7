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

#ifndef NFBEAM_COMMON_HPP
#define NFBEAM_COMMON_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace nfbeam {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double pi = 3.14159265358979323846;

// Deterministic 64-bit generator (splitmix64). Used everywhere randomness is
// needed so that results are bit-reproducible across platforms and standard
// library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64()
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal (Box-Muller on the canonical uniform)
    double normal()
    {
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }

    cxd unit_phasor() { return std::polar(1.0, uniform(0.0, 2.0 * pi)); }

  private:
    std::uint64_t state_;
};

// Stable hash combiner for deriving per-trial seeds from a master seed.
inline std::uint64_t hash_seed(std::uint64_t master, std::uint64_t index)
{
    Rng r(master ^ (0xA0761D6478BD642FULL + index * 0xE7037ED1A0B428DBULL));
    r.next_u64();
    return r.next_u64();
}

} // namespace nfbeam

#endif

// SPDX-License-Identifier: Apache-2.0
//
// beamkit - hybrid analog/digital beamforming design and simulation for
// mmWave OFDM MIMO links
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

#ifndef BEAMKIT_RNG_HPP
#define BEAMKIT_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace beamkit
{

// Seeded random stream with hand-rolled distributions on top of the
// mt19937_64 bit stream. The standard library distributions are
// implementation-defined, so sampling through them would make results
// differ between toolchains; everything here is specified bit-exactly.
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53-bit resolution
    double uniform()
    {
        return double(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi)
    {
        return lo + (hi - lo) * uniform();
    }

    // Standard normal via Box-Muller; the second sample of each pair is cached
    double normal()
    {
        if (has_spare_)
        {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    // Zero-mean Laplacian with the given scale parameter (std dev = scale*sqrt(2))
    double laplacian(double scale)
    {
        const double u = uniform() - 0.5;
        const double a = std::abs(2.0 * u);
        // guard against log(0) at u = +/-0.5
        const double x = -std::log(a >= 1.0 ? 5e-324 : 1.0 - a);
        return (u < 0.0 ? -scale : scale) * x;
    }

    // Circularly-symmetric complex Gaussian with E|z|^2 = variance
    std::complex<double> complex_normal(double variance)
    {
        const double s = std::sqrt(0.5 * variance);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    // Uniform integer in [0, n)
    int uniform_index(int n)
    {
        return int(uniform() * double(n)) % n;
    }

  private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace beamkit

#endif

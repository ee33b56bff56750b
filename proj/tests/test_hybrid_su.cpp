// SPDX-License-Identifier: Apache-2.0
//
// beamkit — hybrid analog/digital beamforming design and simulation library.
//
// Copyright 2026 The beamkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// ---
//
// Unit tests for the single-user hybrid design: the analog coordinate
// descent, the digital stages, the steering-vector shortcut, and the
// ordering between design tiers.

#include "doctest.h"

#include <cmath>
#include <complex>

#include <armadillo>

#include "beamkit/channel.hpp"
#include "beamkit/eval.hpp"
#include "beamkit/hybrid_su.hpp"
#include "beamkit/numerics.hpp"
#include "beamkit/rng.hpp"
#include "beamkit/types.hpp"

using namespace beamkit;

namespace
{

ChannelRealization random_channel(std::uint64_t seed, int tx, int rx, int bins,
                                  int clusters = 4, int rays = 2)
{
    PathSamplingParams params;
    params.clusters = clusters;
    params.rays_per_cluster = rays;
    params.max_cluster_delay = 0.25 * double(bins);
    Rng rng(seed);
    return realize_channel(sample_paths(params, tx, rx, rng), tx, rx, bins);
}

arma::cx_mat random_psd(std::uint64_t seed, int n)
{
    Rng rng(seed);
    arma::cx_mat b(n, 2 * n);
    for (auto& v : b)
        v = rng.complex_normal(1.0);
    return arma::cx_mat(b * b.t() / double(2 * n));
}

} // namespace

TEST_CASE("identity statistics make every phase choice equally good")
{
    // With avg_cov = I and one RF chain the coupling term vanishes, every
    // update lands on phase zero, and the objective is log2(1 + c*N) for any
    // unit-modulus start.
    const int n = 6;
    const double c = 0.8;
    const arma::cx_mat avg_cov = arma::eye<arma::cx_mat>(n, n);
    const StructureMask mask = StructureMask::make(Structure::fully_connected, n, 1);
    const AnalogDesignResult result = design_analog(avg_cov, mask, c, infinite_resolution);
    const double expected = std::log2(1.0 + c * double(n));
    CHECK(analog_objective(result.analog, avg_cov, c) == doctest::Approx(expected).epsilon(1e-12));
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(result.analog(i, 0) - std::complex<double>(1.0, 0.0)) <= 1e-12);
}

TEST_CASE("coordinate descent never decreases the objective")
{
    for (const Structure structure : {Structure::fully_connected, Structure::partially_connected})
        for (std::uint64_t seed = 0; seed < 5; ++seed)
        {
            const arma::cx_mat avg_cov = random_psd(100 + seed, 8);
            const StructureMask mask = StructureMask::make(structure, 8, 2);
            AnalogDesignOptions opts;
            opts.init_seed = seed;
            opts.record_update_objectives = true;
            const AnalogDesignResult result =
                design_analog(avg_cov, mask, 2.0, infinite_resolution, opts);
            REQUIRE(result.update_objectives.size() > 1);
            for (std::size_t i = 1; i < result.update_objectives.size(); ++i)
                CHECK(result.update_objectives[i] >= result.update_objectives[i - 1] - 1e-9);
        }
}

TEST_CASE("quantized descent ends single-flip locally optimal")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        const arma::cx_mat avg_cov = random_psd(200 + seed, 4);
        const StructureMask mask = StructureMask::make(Structure::fully_connected, 4, 2);
        AnalogDesignOptions opts;
        opts.init_seed = seed;
        const AnalogDesignResult result = design_analog(avg_cov, mask, 1.0, 1, opts);
        const double objective = analog_objective(result.analog, avg_cov, 1.0);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 2; ++j)
            {
                arma::cx_mat flipped = result.analog;
                flipped(i, j) = -flipped(i, j);
                CHECK(analog_objective(flipped, avg_cov, 1.0) <= objective + 1e-12);
            }
    }
}

TEST_CASE("quantized designs stay on the constellation")
{
    const arma::cx_mat avg_cov = random_psd(300, 8);
    for (const int bits : {1, 2, 3})
    {
        const StructureMask mask = StructureMask::make(Structure::fully_connected, 8, 2);
        const AnalogDesignResult result = design_analog(avg_cov, mask, 1.5, bits);
        const int count = 1 << bits;
        for (const auto& entry : result.analog)
        {
            double best = 1e300;
            for (int i = 0; i < count; ++i)
                best = std::min(best, std::abs(entry - std::polar(1.0, 2.0 * arma::datum::pi *
                                                                           double(i) /
                                                                           double(count))));
            CHECK(best <= 1e-12);
        }
    }
}

TEST_CASE("partially-connected analog Gram is exactly scaled identity")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const arma::cx_mat avg_cov = random_psd(400 + seed, 12);
        const StructureMask mask = StructureMask::make(Structure::partially_connected, 12, 3);
        const int bits = (seed % 2 == 0) ? infinite_resolution : 2;
        const AnalogDesignResult result = design_analog(avg_cov, mask, 1.0, bits);
        const arma::cx_mat gram = result.analog.t() * result.analog;
        const arma::cx_mat target = (12.0 / 3.0) * arma::eye<arma::cx_mat>(3, 3);
        CHECK(arma::abs(gram - target).max() <= 1e-12);
    }
}

TEST_CASE("digital precoder meets the power budget")
{
    const ChannelRealization channel = random_channel(500, 8, 4, 3);
    const arma::cx_mat avg_cov = average_covariance(channel.subcarrier);
    const StructureMask mask = StructureMask::make(Structure::fully_connected, 8, 3);
    const arma::cx_mat analog = design_analog(avg_cov, mask, 1.0, infinite_resolution).analog;
    const double power = 2.0, noise = 0.1;

    for (const bool equal_power : {false, true})
        for (int k = 0; k < 3; ++k)
        {
            const arma::cx_mat digital = digital_precoder(channel.subcarrier[size_t(k)], analog, 2,
                                                          power, noise, equal_power);
            const double used = std::pow(arma::norm(analog * digital, "fro"), 2);
            CHECK(used <= power * (1.0 + 1e-9));
            if (!equal_power)
                CHECK(used == doctest::Approx(power).epsilon(1e-9)); // water-filling spends it all
        }
}

TEST_CASE("equal-power digital stage uses the full budget when streams fill the chains")
{
    const ChannelRealization channel = random_channel(501, 8, 4, 2);
    const arma::cx_mat avg_cov = average_covariance(channel.subcarrier);
    const StructureMask mask = StructureMask::make(Structure::fully_connected, 8, 2);
    const arma::cx_mat analog = design_analog(avg_cov, mask, 1.0, infinite_resolution).analog;
    const arma::cx_mat digital =
        digital_precoder(channel.subcarrier[0], analog, 2, 3.0, 0.2, true);
    CHECK(std::pow(arma::norm(analog * digital, "fro"), 2) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("digital precoder is locally optimal behind its analog stage")
{
    const ChannelRealization channel = random_channel(502, 8, 4, 1);
    const arma::cx_mat avg_cov = average_covariance(channel.subcarrier);
    const StructureMask mask = StructureMask::make(Structure::fully_connected, 8, 3);
    const arma::cx_mat analog = design_analog(avg_cov, mask, 1.0, infinite_resolution).analog;
    const double power = 1.0, noise = 0.1;
    const arma::cx_mat digital =
        digital_precoder(channel.subcarrier[0], analog, 2, power, noise, false);
    const double base = rate_su_ideal(channel.subcarrier[0], analog * digital, noise);

    Rng rng(503);
    for (int rep = 0; rep < 30; ++rep)
    {
        arma::cx_mat candidate = digital;
        for (auto& v : candidate)
            v += 0.05 * rng.complex_normal(1.0);
        // Rescale to the same transmit power before comparing.
        const double used = std::pow(arma::norm(analog * candidate, "fro"), 2);
        candidate *= std::sqrt(power / used);
        CHECK(rate_su_ideal(channel.subcarrier[0], analog * candidate, noise) <= base + 1e-3);
    }
}

TEST_CASE("mmse combiner beats perturbed combiners")
{
    const ChannelRealization channel = random_channel(504, 6, 4, 1);
    const arma::cx_mat analog_combiner =
        arma::cx_mat(arma::ones<arma::cx_mat>(4, 2) +
                     0.3 * arma::randu<arma::cx_mat>(4, 2)); // any full-rank analog stage
    Rng rng(505);
    arma::cx_mat tx(6, 2);
    for (auto& v : tx)
        v = rng.complex_normal(0.2);
    const double noise = 0.3;
    const arma::cx_mat digital =
        mmse_combiner(channel.subcarrier[0], tx, analog_combiner, noise);
    const double base = rate_su(channel.subcarrier[0], tx, analog_combiner * digital, noise);
    for (int rep = 0; rep < 20; ++rep)
    {
        arma::cx_mat candidate = digital;
        for (auto& v : candidate)
            v += 0.1 * rng.complex_normal(1.0);
        CHECK(rate_su(channel.subcarrier[0], tx, analog_combiner * candidate, noise) <=
              base + 1e-9);
    }
}

TEST_CASE("full link design respects structure, modulus, and power")
{
    const ChannelRealization channel = random_channel(506, 8, 4, 3);
    for (const Structure structure : {Structure::fully_connected, Structure::partially_connected})
        for (const int bits : {infinite_resolution, 1})
        {
            ArchitectureSpec arch;
            arch.tx_antennas = 8;
            arch.rx_antennas = 4;
            arch.rf_chains = 2;
            arch.streams = 2;
            arch.subcarriers = 3;
            arch.structure = structure;
            arch.phase_bits = bits;
            arch.tx_power = 1.5;
            arch.noise_power = 0.05;
            const HybridBeamformer design = design_hybrid_link(channel, arch);
            REQUIRE(design.has_combiner());
            const StructureMask tx_mask = arch.tx_mask();
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 2; ++j)
                {
                    const std::complex<double> v = design.analog_precoder(i, j);
                    if (tx_mask.allows(i, j))
                        CHECK(std::abs(std::abs(v) - 1.0) <= 1e-12);
                    else
                        CHECK(std::abs(v) == 0.0);
                }
            for (int k = 0; k < 3; ++k)
                CHECK(std::pow(arma::norm(design.tx_matrix(size_t(k)), "fro"), 2) <=
                      arch.tx_power * (1.0 + 1e-9));
        }
}

TEST_CASE("design tiers order correctly on paired channels")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        const ChannelRealization channel = random_channel(600 + seed, 8, 4, 4);
        ArchitectureSpec arch;
        arch.tx_antennas = 8;
        arch.rx_antennas = 4;
        arch.rf_chains = 3;
        arch.streams = 2;
        arch.subcarriers = 4;
        arch.tx_power = 1.0;
        arch.noise_power = 0.1;

        const double ideal =
            fully_digital_baseline(channel, arch.streams, arch.tx_power, arch.noise_power)
                .mean_rate;

        SuDesignOptions opts;
        opts.analog.init_seed = seed;
        const double hybrid =
            mean_rate(channel, design_hybrid_link(channel, arch, opts), arch.noise_power);

        ArchitectureSpec quantized = arch;
        quantized.phase_bits = 1;
        const double one_bit =
            mean_rate(channel, design_hybrid_link(channel, quantized, opts), arch.noise_power);

        CHECK(hybrid <= ideal + 1e-6);
        CHECK(one_bit <= ideal + 1e-6);
        CHECK(hybrid > 0.0);
    }
}

TEST_CASE("steering shortcut is exact on a single-path channel")
{
    // One cluster, one ray, no angular spread: the channel is rank one and
    // the steering design with an MMSE combiner is a matched filter, so its
    // rate equals the fully-digital optimum log2(1 + P|a|^2/noise).
    PathSamplingParams params;
    params.clusters = 1;
    params.rays_per_cluster = 1;
    params.angular_spread = 0.0;
    params.max_cluster_delay = 3.0;
    Rng rng(700);
    const int tx = 8, rx = 4, bins = 4;
    const PathSet paths = sample_paths(params, tx, rx, rng);
    const ChannelRealization channel = realize_channel(paths, tx, rx, bins);

    ArchitectureSpec arch;
    arch.tx_antennas = tx;
    arch.rx_antennas = rx;
    arch.rf_chains = 1;
    arch.streams = 1;
    arch.subcarriers = bins;
    arch.tx_power = 2.0;
    arch.noise_power = 0.3;

    const HybridBeamformer design = asymptotic_design(channel, arch);
    const double achieved = mean_rate(channel, design, arch.noise_power);
    const double expected =
        std::log2(1.0 + arch.tx_power * std::norm(paths.gains(0)) / arch.noise_power);
    CHECK(achieved == doctest::Approx(expected).epsilon(1e-9));

    const double ideal =
        fully_digital_baseline(channel, 1, arch.tx_power, arch.noise_power).mean_rate;
    CHECK(achieved == doctest::Approx(ideal).epsilon(1e-9));
}

TEST_CASE("steering shortcut picks the strongest paths")
{
    PathSamplingParams params;
    params.clusters = 3;
    params.rays_per_cluster = 1;
    params.angular_spread = 0.0;
    Rng rng(701);
    PathSet paths = sample_paths(params, 8, 4, rng);
    paths.gains = arma::cx_vec{{0.1, 0.0}, {2.0, 0.0}, {0.5, 0.0}};
    const ChannelRealization channel = realize_channel(paths, 8, 4, 2);

    ArchitectureSpec arch;
    arch.tx_antennas = 8;
    arch.rx_antennas = 4;
    arch.rf_chains = 2;
    arch.streams = 2;
    arch.subcarriers = 2;

    const HybridBeamformer design = asymptotic_design(channel, arch);
    // Columns must be the scaled transmit responses of paths 1 then 2.
    CHECK(arma::norm(design.analog_precoder.col(0) -
                         std::sqrt(8.0) * channel.tx_responses.col(1)) <= 1e-12);
    CHECK(arma::norm(design.analog_precoder.col(1) -
                         std::sqrt(8.0) * channel.tx_responses.col(2)) <= 1e-12);
}

TEST_CASE("asymptotic design rejects unsupported setups")
{
    const ChannelRealization channel = random_channel(702, 8, 4, 2, 1, 1);
    ArchitectureSpec arch;
    arch.tx_antennas = 8;
    arch.rx_antennas = 4;
    arch.rf_chains = 2;
    arch.streams = 2;
    arch.subcarriers = 2;
    // Only one propagation path but two streams requested.
    CHECK_THROWS_AS((void)asymptotic_design(channel, arch), std::invalid_argument);
}

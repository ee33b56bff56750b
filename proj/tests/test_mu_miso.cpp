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
// Unit tests for the multiuser downlink: the weighted-MMSE digital stage,
// rate bookkeeping, the hybrid wrapper, and weight adaptation.

#include "doctest.h"

#include <cmath>
#include <complex>

#include <armadillo>

#include "beamkit/channel.hpp"
#include "beamkit/mu_miso.hpp"
#include "beamkit/rng.hpp"

using namespace beamkit;

namespace
{

// A plain random multiuser channel without pathloss: rows are user channels.
MultiuserChannel random_mu_channel(std::uint64_t seed, int users, int tx, int bins)
{
    Rng rng(seed);
    MultiuserChannel channel;
    channel.stacked.resize(size_t(bins));
    for (auto& bin : channel.stacked)
    {
        bin.set_size(users, tx);
        for (auto& v : bin)
            v = rng.complex_normal(1.0);
    }
    channel.distance_km = arma::vec(users, arma::fill::ones);
    channel.loss_db = arma::vec(users, arma::fill::zeros);
    channel.cluster = arma::uvec(users, arma::fill::zeros);
    return channel;
}

double used_power(const arma::cx_mat& analog, const arma::cx_mat& digital)
{
    return std::pow(arma::norm(analog * digital, "fro"), 2);
}

} // namespace

TEST_CASE("single user converges to matched-filter beamforming")
{
    const MultiuserChannel channel = random_mu_channel(31, 1, 6, 1);
    const double power = 2.0, noise = 0.5;
    const MuPrecoder design =
        fully_digital_wmmse(channel, arma::vec{1.0}, power, noise);
    const double rate = user_rates(channel, design.analog, design.digital, noise)(0);
    const double expected = std::log2(
        1.0 + power * std::pow(arma::norm(channel.stacked[0].row(0)), 2) / noise);
    CHECK(rate == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("orthogonal equal-strength users share the budget evenly")
{
    // Channel rows = scaled identity block: no inter-user interference and
    // symmetric gains, so the optimum splits power equally.
    const int users = 3, tx = 3;
    MultiuserChannel channel;
    channel.stacked.assign(1, 2.0 * arma::eye<arma::cx_mat>(users, tx));
    channel.distance_km = arma::vec(users, arma::fill::ones);
    channel.loss_db = arma::vec(users, arma::fill::zeros);
    channel.cluster = arma::uvec(users, arma::fill::zeros);

    const double power = 3.0, noise = 1.0;
    const MuPrecoder design = fully_digital_wmmse(
        channel, arma::vec(users, arma::fill::ones), power, noise);
    const arma::vec rates = user_rates(channel, design.analog, design.digital, noise);
    const double expected = std::log2(1.0 + (power / users) * 4.0 / noise);
    for (int n = 0; n < users; ++n)
        CHECK(rates(n) == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("objective trace is monotone and power constraints hold")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        const MultiuserChannel channel = random_mu_channel(40 + seed, 4, 8, 3);
        arma::vec weights{1.0, 2.0, 0.5, 1.5};
        const double power = 1.0, noise = 0.2;
        const MuPrecoder design = fully_digital_wmmse(channel, weights, power, noise);

        REQUIRE(design.objective_trace.size() >= 2);
        for (std::size_t i = 1; i < design.objective_trace.size(); ++i)
            CHECK(design.objective_trace[i] >= design.objective_trace[i - 1] - 1e-8);

        REQUIRE(design.digital.size() == 3);
        for (std::size_t k = 0; k < 3; ++k)
        {
            const double used = used_power(design.analog, design.digital[k]);
            CHECK(used <= power * (1.0 + 1e-6));
            // Complementary slackness: an active multiplier means a tight budget.
            const double slack = design.multipliers(k) * (power - used);
            CHECK(slack <= 1e-6 * power * std::max(1.0, design.multipliers(k)));
        }

        // The reported final objective matches an independent recomputation.
        const double reported = design.objective_trace.back();
        const double recomputed =
            weighted_sum_rate(channel, design.analog, design.digital, weights, noise);
        CHECK(recomputed == doctest::Approx(reported).epsilon(1e-8));
    }
}

TEST_CASE("scaling every weight leaves the design unchanged")
{
    const MultiuserChannel channel = random_mu_channel(50, 3, 6, 2);
    const arma::vec weights{1.0, 3.0, 0.25};
    const double power = 1.5, noise = 0.3;
    const MuPrecoder a = fully_digital_wmmse(channel, weights, power, noise);
    const MuPrecoder b = fully_digital_wmmse(channel, arma::vec(7.0 * weights), power, noise);
    REQUIRE(a.digital.size() == b.digital.size());
    for (std::size_t k = 0; k < a.digital.size(); ++k)
        CHECK(arma::norm(a.digital[k] - b.digital[k], "fro") <= 1e-8 * arma::norm(a.digital[k], "fro"));
}

TEST_CASE("rate_mu matches a hand-rolled SINR computation")
{
    const MultiuserChannel channel = random_mu_channel(60, 3, 5, 1);
    Rng rng(61);
    arma::cx_mat digital(5, 3);
    for (auto& v : digital)
        v = rng.complex_normal(0.5);
    const arma::cx_mat analog = arma::eye<arma::cx_mat>(5, 5);
    const double noise = 0.4;
    for (int n = 0; n < 3; ++n)
    {
        const arma::cx_rowvec row = channel.stacked[0].row(n);
        double interference = noise;
        for (int i = 0; i < 3; ++i)
            if (i != n)
                interference += std::norm(arma::as_scalar(row * digital.col(i)));
        const double signal = std::norm(arma::as_scalar(row * digital.col(n)));
        const double expected = std::log2(1.0 + signal / interference);
        CHECK(rate_mu(row, analog, digital, n, noise) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("higher weight shifts rate toward that user")
{
    const MultiuserChannel channel = random_mu_channel(70, 2, 6, 1);
    const double power = 1.0, noise = 0.1;
    const MuPrecoder fair =
        fully_digital_wmmse(channel, arma::vec{1.0, 1.0}, power, noise);
    const MuPrecoder skewed =
        fully_digital_wmmse(channel, arma::vec{5.0, 0.2}, power, noise);
    const arma::vec fair_rates = user_rates(channel, fair.analog, fair.digital, noise);
    const arma::vec skewed_rates = user_rates(channel, skewed.analog, skewed.digital, noise);
    CHECK(skewed_rates(0) >= fair_rates(0) - 1e-9);
}

TEST_CASE("hybrid wrapper obeys its RF width and modulus constraints")
{
    const MultiuserChannel channel = random_mu_channel(80, 4, 12, 2);
    const double power = 1.0, noise = 0.05;
    const MuPrecoder design =
        hybrid_mu_design(channel, 6, arma::vec(4, arma::fill::ones), power, noise);
    REQUIRE(design.analog.n_rows == 12);
    REQUIRE(design.analog.n_cols == 6);
    for (const auto& v : design.analog)
        CHECK(std::abs(std::abs(v) - 1.0) <= 1e-12);
    for (const auto& d : design.digital)
    {
        REQUIRE(d.n_rows == 6);
        REQUIRE(d.n_cols == 4);
        CHECK(used_power(design.analog, d) <= power * (1.0 + 1e-6));
    }
    const arma::vec rates = user_rates(channel, design.analog, design.digital, noise);
    CHECK(rates.min() >= 0.0);
    CHECK(arma::accu(rates) > 0.0);
}

TEST_CASE("adapt_weights inverts averages and normalizes")
{
    const arma::vec equal = adapt_weights(arma::vec(4, arma::fill::zeros));
    for (int i = 0; i < 4; ++i)
        CHECK(equal(i) == doctest::Approx(1.0).epsilon(1e-9));

    const arma::vec skew = adapt_weights(arma::vec{1.0, 1e9, 1.0, 1.0});
    CHECK(arma::accu(skew) == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(skew(1) < 1e-6);
    CHECK(skew(0) == doctest::Approx(skew(2)).epsilon(1e-12));

    // Lower historical rate draws a larger weight.
    const arma::vec tilt = adapt_weights(arma::vec{0.5, 2.0});
    CHECK(tilt(0) > tilt(1));
}

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
// Unit tests for rate evaluation and the Monte Carlo drivers.  The rate
// formulas are checked against an independently coded projection-based
// computation in the full receive dimension.

#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstring>

#include <armadillo>

#include "beamkit/channel.hpp"
#include "beamkit/eval.hpp"
#include "beamkit/rng.hpp"
#include "beamkit/scenario.hpp"

using namespace beamkit;

namespace
{

arma::cx_mat random_complex(Rng& rng, int rows, int cols, double scale = 1.0)
{
    arma::cx_mat m(rows, cols);
    for (auto& v : m)
        v = rng.complex_normal(scale);
    return m;
}

// Independent reference for the linear-receiver rate: project the received
// signal onto the combiner column space, C = W (W^H W)^{-1} W^H, and take
// log2 det(I + C H V V^H H^H / noise) in the full receive dimension.
double projection_rate(const arma::cx_mat& h, const arma::cx_mat& v, const arma::cx_mat& w,
                       double noise)
{
    const arma::cx_mat projector = w * arma::inv(arma::cx_mat(w.t() * w)) * w.t();
    const arma::cx_mat signal = h * v * v.t() * h.t();
    const arma::cx_mat inside =
        arma::eye<arma::cx_mat>(h.n_rows, h.n_rows) + projector * signal / noise;
    return arma::log_det(inside).real() / std::log(2.0);
}

Scenario tiny_scenario()
{
    Scenario scenario;
    scenario.arch.tx_antennas = 8;
    scenario.arch.rx_antennas = 4;
    scenario.arch.rf_chains = 2;
    scenario.arch.streams = 2;
    scenario.arch.subcarriers = 4;
    scenario.mode = Mode::su_sweep_snr;
    scenario.snr_db = {0.0, 10.0};
    scenario.trials = 6;
    scenario.seed = 3;
    scenario.methods = {"fully_digital", "hybrid"};
    return scenario;
}

bool same_bits(double a, double b)
{
    return std::memcmp(&a, &b, sizeof a) == 0;
}

} // namespace

TEST_CASE("rate_su agrees with the projection-based reference")
{
    Rng rng(91);
    for (int rep = 0; rep < 30; ++rep)
    {
        const arma::cx_mat h = random_complex(rng, 5, 7);
        const arma::cx_mat v = random_complex(rng, 7, 2, 0.4);
        const arma::cx_mat w = random_complex(rng, 5, 2);
        const double noise = 0.2 + rng.uniform();
        CHECK(rate_su(h, v, w, noise) ==
              doctest::Approx(projection_rate(h, v, w, noise)).epsilon(1e-9));
    }
}

TEST_CASE("rate_su_ideal agrees with the full-dimension determinant")
{
    Rng rng(92);
    for (int rep = 0; rep < 30; ++rep)
    {
        const arma::cx_mat h = random_complex(rng, 4, 6);
        const arma::cx_mat v = random_complex(rng, 6, 3, 0.3);
        const double noise = 0.1 + rng.uniform();
        const arma::cx_mat inside = arma::eye<arma::cx_mat>(4, 4) +
                                    h * v * v.t() * h.t() / noise;
        const double reference = arma::log_det(inside).real() / std::log(2.0);
        CHECK(rate_su_ideal(h, v, noise) == doctest::Approx(reference).epsilon(1e-9));
    }
}

TEST_CASE("a combiner spanning the received signal recovers the ideal rate")
{
    Rng rng(93);
    const arma::cx_mat h = random_complex(rng, 6, 8);
    const arma::cx_mat v = random_complex(rng, 8, 2, 0.5);
    const double noise = 0.3;
    // W = H V spans the signal subspace, so nothing is lost at the receiver.
    CHECK(rate_su(h, v, arma::cx_mat(h * v), noise) ==
          doctest::Approx(rate_su_ideal(h, v, noise)).epsilon(1e-9));

    // A combiner orthogonal to part of the signal space loses rate.
    const arma::cx_mat w_partial = random_complex(rng, 6, 2);
    CHECK(rate_su(h, v, w_partial, noise) <= rate_su_ideal(h, v, noise) + 1e-9);
}

TEST_CASE("a rank-deficient combiner yields the rate of its column space")
{
    Rng rng(94);
    const arma::cx_mat h = random_complex(rng, 4, 4);
    const arma::cx_mat v = random_complex(rng, 4, 2);
    arma::cx_mat w(4, 2);
    w.col(0) = random_complex(rng, 4, 1);
    w.col(1) = 2.0 * w.col(0); // both columns span the same line
    const double collapsed = rate_su(h, v, w, 1.0);
    CHECK(collapsed ==
          doctest::Approx(projection_rate(h, v, arma::cx_mat(w.col(0)), 1.0)).epsilon(1e-9));
    CHECK(collapsed <= rate_su_ideal(h, v, 1.0) + 1e-9);

    // An all-zero combiner receives nothing.
    CHECK(rate_su(h, v, arma::cx_mat(4, 2, arma::fill::zeros), 1.0) == 0.0);
}

TEST_CASE("fully-digital baseline is consistent and monotone in power")
{
    PathSamplingParams params;
    Rng rng(95);
    const ChannelRealization channel =
        realize_channel(sample_paths(params, 6, 4, rng), 6, 4, 3);

    const FullyDigitalResult low = fully_digital_baseline(channel, 2, 1.0, 0.1);
    const FullyDigitalResult high = fully_digital_baseline(channel, 2, 2.0, 0.1);
    CHECK(high.mean_rate > low.mean_rate);

    // The reported mean rate matches evaluating the returned precoders.
    double recomputed = 0.0;
    for (int k = 0; k < 3; ++k)
        recomputed += rate_su_ideal(channel.subcarrier[size_t(k)], low.precoders[size_t(k)], 0.1) / 3.0;
    CHECK(recomputed == doctest::Approx(low.mean_rate).epsilon(1e-9));

    // Power budget is spent exactly.
    for (const auto& v : low.precoders)
        CHECK(std::pow(arma::norm(v, "fro"), 2) == doctest::Approx(1.0).epsilon(1e-9));

    // More streams cannot hurt.
    const FullyDigitalResult wide = fully_digital_baseline(channel, 4, 1.0, 0.1);
    CHECK(wide.mean_rate >= low.mean_rate - 1e-9);
}

TEST_CASE("unit conversions hand-derived values")
{
    // -55 dBm/Hz over a 1 MHz subcarrier: -55 + 60 = 5 dBm = 10^-2.5 W.
    CHECK(per_subcarrier_dbm(-55.0, 32.0, 32) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(dbm_to_watt(per_subcarrier_dbm(-55.0, 32.0, 32)) ==
          doctest::Approx(std::pow(10.0, -2.5)).epsilon(1e-12));
    CHECK(dbm_to_watt(per_subcarrier_dbm(-139.0, 32.0, 32)) ==
          doctest::Approx(std::pow(10.0, -10.9)).epsilon(1e-12));
    CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("parallel and serial drivers agree bit for bit")
{
    const Scenario scenario = tiny_scenario();
    MonteCarloOptions opts;
    opts.keep_trials = true;
    const SweepResult parallel = monte_carlo(scenario, opts);
    const SweepResult serial = monte_carlo_serial(scenario, opts);

    REQUIRE(parallel.axis == serial.axis);
    REQUIRE(parallel.cells.size() == serial.cells.size());
    for (std::size_t a = 0; a < parallel.cells.size(); ++a)
        for (std::size_t m = 0; m < parallel.cells[a].size(); ++m)
        {
            CHECK(same_bits(parallel.cells[a][m].mean, serial.cells[a][m].mean));
            CHECK(same_bits(parallel.cells[a][m].std_error, serial.cells[a][m].std_error));
            CHECK(parallel.cells[a][m].successes == serial.cells[a][m].successes);
            for (int t = 0; t < scenario.trials; ++t)
                CHECK(same_bits(parallel.trial_values[a][m][size_t(t)],
                                serial.trial_values[a][m][size_t(t)]));
        }
}

TEST_CASE("the sweep is deterministic and fully successful on a healthy scenario")
{
    const Scenario scenario = tiny_scenario();
    const SweepResult once = monte_carlo(scenario);
    const SweepResult again = monte_carlo(scenario);
    for (std::size_t a = 0; a < once.cells.size(); ++a)
        for (std::size_t m = 0; m < once.cells[a].size(); ++m)
        {
            CHECK(same_bits(once.cells[a][m].mean, again.cells[a][m].mean));
            CHECK(once.cells[a][m].successes == scenario.trials);
            CHECK(once.cells[a][m].failed == 0);
        }
    // Higher SNR gives a higher mean rate for every method.
    for (std::size_t m = 0; m < once.methods.size(); ++m)
        CHECK(once.cells[1][m].mean > once.cells[0][m].mean);
}

TEST_CASE("per-trial values are paired and ordered across methods")
{
    Scenario scenario = tiny_scenario();
    scenario.methods = {"fully_digital", "hybrid", "hybrid_b1"};
    MonteCarloOptions opts;
    opts.keep_trials = true;
    const SweepResult result = monte_carlo(scenario, opts);
    for (std::size_t a = 0; a < result.axis.size(); ++a)
        for (int t = 0; t < scenario.trials; ++t)
        {
            const double ideal = result.trial_values[a][0][size_t(t)];
            const double hybrid = result.trial_values[a][1][size_t(t)];
            CHECK(hybrid <= ideal + 1e-6);
        }
}

TEST_CASE("multiuser sweep runs deterministically")
{
    Scenario scenario;
    scenario.arch.tx_antennas = 8;
    scenario.arch.rx_antennas = 1;
    scenario.arch.rf_chains = 4;
    scenario.arch.streams = 1;
    scenario.arch.subcarriers = 2;
    scenario.mode = Mode::mu_sum_rate;
    scenario.users = 2;
    scenario.env_clusters = 3;
    scenario.trials = 4;
    scenario.seed = 9;
    scenario.tx_psd_dbm_hz = {-55.0};
    scenario.weight_protocol = WeightProtocol::inverse_expected;
    scenario.methods = {"fully_digital", "hybrid_rf4", "fully_digital_nt4"};

    const SweepResult once = monte_carlo(scenario);
    const SweepResult again = monte_carlo_serial(scenario);
    for (std::size_t m = 0; m < once.methods.size(); ++m)
    {
        CHECK(same_bits(once.cells[0][m].mean, again.cells[0][m].mean));
        CHECK(once.cells[0][m].successes == scenario.trials);
        CHECK(once.cells[0][m].mean > 0.0);
    }

    // Cutting the array in half cannot help the fully-digital design.
    const auto index_of = [&](const std::string& name) {
        for (std::size_t m = 0; m < once.methods.size(); ++m)
            if (once.methods[m] == name)
                return m;
        REQUIRE(false);
        return std::size_t(0);
    };
    CHECK(once.cells[0][index_of("fully_digital_nt4")].mean <=
          once.cells[0][index_of("fully_digital")].mean + 1e-6);
}

TEST_CASE("rate CDF protocol is deterministic and well-formed")
{
    Scenario scenario;
    scenario.arch.tx_antennas = 8;
    scenario.arch.rx_antennas = 1;
    scenario.arch.rf_chains = 4;
    scenario.arch.streams = 1;
    scenario.arch.subcarriers = 2;
    scenario.mode = Mode::mu_cdf;
    scenario.users = 2;
    scenario.population = 6;
    scenario.env_clusters = 3;
    scenario.trials = 10;
    scenario.seed = 10;
    scenario.tx_psd_dbm_hz = {-50.0};
    scenario.weight_protocol = WeightProtocol::adaptive;
    scenario.methods = {"fully_digital", "hybrid_rf4"};

    const CdfResult once = run_mu_cdf(scenario);
    const CdfResult again = run_mu_cdf(scenario);
    REQUIRE(once.methods == scenario.methods);
    for (std::size_t m = 0; m < once.rates.size(); ++m)
    {
        REQUIRE(once.rates[m] == again.rates[m]);
        CHECK(!once.rates[m].empty());
        CHECK(once.rates[m].size() <= std::size_t(scenario.population));
        for (std::size_t i = 1; i < once.rates[m].size(); ++i)
            CHECK(once.rates[m][i] >= once.rates[m][i - 1]);
        for (const double r : once.rates[m])
            CHECK(r > 0.0);
    }
}

TEST_CASE("rate_cdf filters, sorts, and positions")
{
    const CdfCurve curve =
        rate_cdf({3.0, 1.0, std::numeric_limits<double>::quiet_NaN(), 2.0});
    REQUIRE(curve.value.size() == 3);
    CHECK(curve.value[0] == 1.0);
    CHECK(curve.value[2] == 3.0);
    CHECK(curve.probability[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(curve.probability[2] == doctest::Approx(1.0).epsilon(1e-12));
}

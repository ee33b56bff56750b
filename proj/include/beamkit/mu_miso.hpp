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

#pragma once

#include <vector>

#include "beamkit/channel.hpp"
#include "beamkit/hybrid_su.hpp"

namespace beamkit
{

// ---------- Weighted-MMSE digital precoding ----------

struct WmmseOptions
{
    int max_iters = 200;
    double rel_tol = 1e-5; // stop when the weighted sum rate gains less than this, relatively
};

struct WmmseResult
{
    std::vector<arma::cx_mat> precoders;  // rf_chains x users per subcarrier; column n serves user n
    std::vector<double> objective_trace;  // weighted sum rate: initial value, then one entry per iteration
    arma::vec multipliers;                // final per-subcarrier power-constraint multipliers
    int iterations = 0;
};

// Alternating scalar-receiver / MSE-weight / precoder updates maximizing the
// weighted sum rate under a per-subcarrier power budget. `effective[k]` holds
// one conjugate-transposed effective user channel per row (users x rf_chains);
// `gram` is the analog-stage Gram matrix defining transmit power
// trace(gram * V * V^H). The per-subcarrier multiplier is found by bisection
// on the monotone power curve, polished by Newton steps so the constraint is
// met essentially exactly whenever it is active.
WmmseResult wmmse_digital(const std::vector<arma::cx_mat>& effective, const arma::cx_mat& gram,
                          const arma::vec& weights, double power, double noise_power,
                          const WmmseOptions& opts = {});

// ---------- Rate bookkeeping ----------

// Single-user SINR rate on one subcarrier: channel_row is the user's
// conjugate-transposed channel, digital holds all users' precoders.
double rate_mu(const arma::cx_rowvec& channel_row, const arma::cx_mat& analog,
               const arma::cx_mat& digital, int user, double noise_power);

// Per-user rates averaged over subcarriers (unweighted), in bits/s/Hz.
arma::vec user_rates(const MultiuserChannel& channel, const arma::cx_mat& analog,
                     const std::vector<arma::cx_mat>& precoders, double noise_power);

// weights dot user_rates.
double weighted_sum_rate(const MultiuserChannel& channel, const arma::cx_mat& analog,
                         const std::vector<arma::cx_mat>& precoders, const arma::vec& weights,
                         double noise_power);

// ---------- End-to-end designs ----------

struct MuPrecoder
{
    arma::cx_mat analog;               // tx_antennas x rf_chains (identity for fully-digital)
    std::vector<arma::cx_mat> digital; // rf_chains x users per subcarrier
    arma::vec weights;
    std::vector<double> objective_trace;
    arma::vec multipliers;
};

struct MuDesignOptions
{
    AnalogDesignOptions analog;
    WmmseOptions wmmse;
};

// Analog stage from the stacked-user channel statistics (users treated as a
// cooperative receiver), then weighted-MMSE digital precoders behind it.
MuPrecoder hybrid_mu_design(const MultiuserChannel& channel, int rf_chains, const arma::vec& weights,
                            double power, double noise_power, const MuDesignOptions& opts = {});

// Baseline with one RF chain per antenna (analog stage = identity).
MuPrecoder fully_digital_wmmse(const MultiuserChannel& channel, const arma::vec& weights,
                               double power, double noise_power, const WmmseOptions& opts = {});

// Priority weights proportional to inverse historical average rate,
// normalized to sum to the user count; a small floor guards idle users.
arma::vec adapt_weights(const arma::vec& average_rates);

} // namespace beamkit

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

#include <cstdint>
#include <vector>

#include "beamkit/channel.hpp"
#include "beamkit/types.hpp"

namespace beamkit
{

// ---------- Analog-stage design (coordinate descent) ----------

struct AnalogDesignOptions
{
    int max_sweeps = 50;      // full passes over the allowed entries
    double rel_tol = 1e-6;    // stop when a sweep gains less than this, relatively
    std::uint64_t init_seed = 0; // seeds the random starting phases
    bool record_update_objectives = false; // trace the objective after every entry update
};

struct AnalogDesignResult
{
    arma::cx_mat analog;            // mask- and modulus-feasible phase matrix
    std::vector<double> sweep_objectives;  // objective in bits after each sweep
    std::vector<double> update_objectives; // per-entry trace, when requested
    int sweeps = 0;
};

// Mean of the per-subcarrier channel Gram matrices (tx side, tx x tx).
arma::cx_mat average_covariance(const std::vector<arma::cx_mat>& channels);

// log2 det(I + gain_over_noise * analog^H * avg_cov * analog), in bits.
double analog_objective(const arma::cx_mat& analog, const arma::cx_mat& avg_cov,
                        double gain_over_noise);

// Maximizes analog_objective over unit-modulus entries on the mask by cyclic
// per-entry updates. Each unquantized update is exactly non-decreasing; with
// finite phase resolution an update is kept only if it does not decrease the
// objective, and the loop stops once a full sweep changes nothing.
AnalogDesignResult design_analog(const arma::cx_mat& avg_cov, const StructureMask& mask,
                                 double gain_over_noise, int phase_bits,
                                 const AnalogDesignOptions& opts = {});

// Receive-side variant: same search with gain_over_noise = 1/(noise_power*tau),
// where tau is rx_antennas (fully-connected) or rx_antennas/rf_chains.
AnalogDesignResult design_analog_combiner(const arma::cx_mat& avg_cov, const StructureMask& mask,
                                          double noise_power, double tau, int phase_bits,
                                          const AnalogDesignOptions& opts = {});

// ---------- Digital stages ----------

// Optimal per-subcarrier digital precoder behind a fixed analog stage: whiten
// by the analog Gram, keep the top singular directions, and water-fill power
// across them. With equal_power set, the streams instead share the
// architecture's fixed normalization (power never exceeds the budget).
arma::cx_mat digital_precoder(const arma::cx_mat& channel_bin, const arma::cx_mat& analog,
                              int streams, double power, double noise_power,
                              bool equal_power = false);

// Mean of H[k] * Vt[k] * Vt[k]^H * H[k]^H over subcarriers (rx side, rx x rx).
arma::cx_mat combiner_covariance(const std::vector<arma::cx_mat>& channels,
                                 const std::vector<arma::cx_mat>& tx_matrices);

// Linear MMSE digital combiner for one subcarrier behind a fixed analog
// combiner and a fixed composite transmit matrix.
arma::cx_mat mmse_combiner(const arma::cx_mat& channel_bin, const arma::cx_mat& tx_bin,
                           const arma::cx_mat& analog_combiner, double noise_power);

// ---------- End-to-end designs ----------

struct SuDesignOptions
{
    AnalogDesignOptions analog;
    bool equal_power = false; // equal per-stream power instead of water-filling
    bool tx_only = false;     // design the transmitter only (ideal digital receiver)
};

// Full link design: analog precoder on the averaged channel Gram, digital
// precoders per subcarrier, then (unless tx_only) analog combiner on the
// resulting receive covariance and MMSE digital combiners.
HybridBeamformer design_hybrid_link(const ChannelRealization& channel, const ArchitectureSpec& spec,
                                    const SuDesignOptions& opts = {});

// Large-array shortcut: analog stages taken from the array responses of the
// strongest paths (one steering beam per RF chain, at both ends), then the
// standard per-subcarrier water-filling digital stage over the steered
// effective channel and MMSE digital combiners. Requires a fully-connected
// structure, unquantized phases, and at least `rf_chains` propagation paths.
HybridBeamformer asymptotic_design(const ChannelRealization& channel, const ArchitectureSpec& spec);

} // namespace beamkit

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

#include <armadillo>
#include <cstddef>
#include <vector>

#include "beamkit/numerics.hpp"

namespace beamkit
{

// Connectivity of the analog beamforming network: every RF chain drives all
// antennas, or each RF chain drives its own disjoint subarray.
enum class Structure
{
    fully_connected,
    partially_connected
};

// ---------- StructureMask ----------

// Which (antenna, RF chain) pairs may carry a nonzero phase-shifter weight.
struct StructureMask
{
    int rows = 0;                                     // antennas
    int cols = 0;                                     // RF chains
    Structure structure = Structure::fully_connected; // connectivity pattern

    // Builds a mask, validating that the partially-connected layout divides
    // the antennas evenly across RF chains.
    static StructureMask make(Structure structure, int rows, int cols);

    // Antennas per subarray (rows/cols); rows for the fully-connected case.
    int block_rows() const;

    bool allows(int row, int col) const;
};

// ---------- ArchitectureSpec ----------

// Hardware and signalling description of one hybrid transceiver link.
struct ArchitectureSpec
{
    int tx_antennas = 0;  // transmit array size
    int rx_antennas = 0;  // receive array size
    int rf_chains = 0;    // RF chains per side
    int streams = 0;      // spatial streams per subcarrier
    int subcarriers = 0;  // OFDM bins
    Structure structure = Structure::fully_connected;
    int phase_bits = infinite_resolution; // phase-shifter resolution
    double tx_power = 1.0;                // per-subcarrier power, linear units
    double noise_power = 1.0;             // per-subcarrier noise power, linear units

    StructureMask tx_mask() const; // precoder connectivity
    StructureMask rx_mask() const; // combiner connectivity

    bool operator==(const ArchitectureSpec&) const = default;

    // Throws std::invalid_argument when any invariant is violated.
    void validate() const;
};

// ---------- HybridBeamformer ----------

// A full two-stage beamformer: one wideband analog stage per side plus
// per-subcarrier digital matrices.
struct HybridBeamformer
{
    arma::cx_mat analog_precoder;                // tx_antennas x rf_chains
    std::vector<arma::cx_mat> digital_precoders; // per subcarrier, rf_chains x streams
    arma::cx_mat analog_combiner;                // rx_antennas x rf_chains; empty = ideal receiver
    std::vector<arma::cx_mat> digital_combiners; // per subcarrier, rf_chains x streams
    double power_scale = 0.0;                    // equal-power normalization used, if any

    // Composite transmit matrix of subcarrier k (analog * digital).
    arma::cx_mat tx_matrix(std::size_t k) const;

    // Composite receive matrix of subcarrier k; throws when no combiner is set.
    arma::cx_mat rx_matrix(std::size_t k) const;

    bool has_combiner() const { return !analog_combiner.is_empty(); }
};

} // namespace beamkit

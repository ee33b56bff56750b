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

#include "beamkit/types.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace beamkit
{

// ---------- StructureMask ----------

StructureMask StructureMask::make(Structure structure, int rows, int cols)
{
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("StructureMask: dimensions must be positive");
    if (cols > rows)
        throw std::invalid_argument("StructureMask: more RF chains than antennas");
    if (structure == Structure::partially_connected && rows % cols != 0)
        throw std::invalid_argument("StructureMask: partially-connected layout needs the RF-chain count (" +
                                    std::to_string(cols) + ") to divide the antenna count (" +
                                    std::to_string(rows) + ")");
    StructureMask mask;
    mask.rows = rows;
    mask.cols = cols;
    mask.structure = structure;
    return mask;
}

int StructureMask::block_rows() const
{
    return structure == Structure::partially_connected ? rows / cols : rows;
}

bool StructureMask::allows(int row, int col) const
{
    if (row < 0 || row >= rows || col < 0 || col >= cols)
        return false;
    if (structure == Structure::fully_connected)
        return true;
    return row / (rows / cols) == col;
}

// ---------- ArchitectureSpec ----------

StructureMask ArchitectureSpec::tx_mask() const
{
    return StructureMask::make(structure, tx_antennas, rf_chains);
}

StructureMask ArchitectureSpec::rx_mask() const
{
    return StructureMask::make(structure, rx_antennas, rf_chains);
}

void ArchitectureSpec::validate() const
{
    if (tx_antennas < 1 || rx_antennas < 1 || rf_chains < 1 || streams < 1 || subcarriers < 1)
        throw std::invalid_argument("ArchitectureSpec: all counts must be positive");
    if (streams > rf_chains)
        throw std::invalid_argument("ArchitectureSpec: more streams (" + std::to_string(streams) +
                                    ") than RF chains (" + std::to_string(rf_chains) + ")");
    if (rf_chains > std::min(tx_antennas, rx_antennas))
        throw std::invalid_argument("ArchitectureSpec: RF-chain count exceeds the smaller array size");
    if (structure == Structure::partially_connected &&
        (tx_antennas % rf_chains != 0 || rx_antennas % rf_chains != 0))
        throw std::invalid_argument("ArchitectureSpec: partially-connected arrays must split evenly "
                                    "across RF chains");
    if (phase_bits < 0)
        throw std::invalid_argument("ArchitectureSpec: negative phase resolution");
    if (!(tx_power > 0.0) || !(noise_power > 0.0))
        throw std::invalid_argument("ArchitectureSpec: powers must be positive");
}

// ---------- HybridBeamformer ----------

arma::cx_mat HybridBeamformer::tx_matrix(std::size_t k) const
{
    if (k >= digital_precoders.size())
        throw std::out_of_range("HybridBeamformer: subcarrier index out of range");
    return analog_precoder * digital_precoders[k];
}

arma::cx_mat HybridBeamformer::rx_matrix(std::size_t k) const
{
    if (!has_combiner())
        throw std::logic_error("HybridBeamformer: no combiner was designed");
    if (k >= digital_combiners.size())
        throw std::out_of_range("HybridBeamformer: subcarrier index out of range");
    return analog_combiner * digital_combiners[k];
}

} // namespace beamkit

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
#include <vector>

#include "beamkit/rng.hpp"

namespace beamkit
{

// ---------- Geometric cluster model ----------

// One draw of the propagation geometry: clustered paths with complex gains,
// departure/arrival angles, and one normalized delay per cluster.
struct PathSet
{
    int clusters = 0;
    int rays_per_cluster = 0;
    arma::cx_vec gains;          // clusters*rays_per_cluster entries, cluster-major
    arma::vec departure_angles;  // radians, same layout as gains
    arma::vec arrival_angles;    // radians
    arma::vec cluster_delays;    // one nonnegative normalized delay per cluster

    int total_paths() const { return clusters * rays_per_cluster; }

    // Throws std::invalid_argument when the layout is inconsistent.
    void validate() const;
};

// Knobs for drawing a PathSet.
struct PathSamplingParams
{
    int clusters = 5;
    int rays_per_cluster = 10;
    double angular_spread = 0.17453292519943295; // std dev of ray offsets, radians (10 deg)
    double max_cluster_delay = 0.0;              // delays uniform on [0, max_cluster_delay]
};

// Steering vector of an N-element uniform linear array: entry n equals
// (1/sqrt(N)) * exp(j*2*pi*spacing*n*sin(angle)).
arma::cx_vec ula_response(double angle, int antennas, double spacing_over_wavelength = 0.5);

// Draws cluster mean angles uniformly on [0, 2*pi), Laplacian ray offsets
// around them (wrapped, not truncated), complex Gaussian gains with variance
// tx_antennas*rx_antennas/(clusters*rays_per_cluster), and uniform delays.
PathSet sample_paths(const PathSamplingParams& params, int tx_antennas, int rx_antennas, Rng& rng);

// ---------- Frequency-selective realization ----------

// Per-subcarrier channel matrices together with the geometry that produced
// them and the stacked array-response matrices.
struct ChannelRealization
{
    std::vector<arma::cx_mat> subcarrier; // rx_antennas x tx_antennas, one per bin
    PathSet paths;
    arma::cx_mat tx_responses; // tx_antennas x total_paths
    arma::cx_mat rx_responses; // rx_antennas x total_paths

    int subcarriers() const { return static_cast<int>(subcarrier.size()); }
    int tx_antennas() const { return static_cast<int>(tx_responses.n_rows); }
    int rx_antennas() const { return static_cast<int>(rx_responses.n_rows); }
};

// Builds every subcarrier channel from the path geometry using the compact
// product form (response matrices times a per-bin diagonal of phased gains).
// Subcarrier indices are 0-based; bin 0 carries no delay phase.
ChannelRealization realize_channel(const PathSet& paths, int tx_antennas, int rx_antennas,
                                   int subcarriers);

// Same channel built as an explicit sum of rank-one path contributions; kept
// as an independent cross-check of realize_channel.
arma::cx_mat realize_channel_reference(const PathSet& paths, int tx_antennas, int rx_antennas,
                                       int bin, int subcarriers);

// Urban macro distance-based loss in dB: 128.1 + 37.6*log10(distance_km).
double pathloss_db(double distance_km);

// ---------- Multiuser downlink channel ----------

// Knobs for the cellular single-cell scenario.
struct MuChannelParams
{
    int env_clusters = 10;    // scattering clusters in the cell
    int rays_per_cluster = 10;
    double angular_spread = 0.17453292519943295; // radians
    double max_cluster_delay = 0.0;
    double radius_km = 0.2;        // cell radius
    double min_distance_km = 0.01; // distance floor avoiding the pathloss singularity
};

// Fixed scattering environment: per-cluster ray departure angles and delays.
struct MuEnvironment
{
    arma::mat ray_departure_angles; // rays_per_cluster x env_clusters
    arma::vec cluster_delays;       // env_clusters entries
};

// A set of user positions: distance to the base station, the resulting
// pathloss, and the scattering cluster each user sees.
struct MuUserSet
{
    arma::vec distance_km;
    arma::vec loss_db;
    arma::uvec cluster;

    int count() const { return static_cast<int>(distance_km.n_elem); }
};

// Per-subcarrier stacked downlink channel. Row n of stacked[k] is the
// conjugate-transposed channel of the n-th selected user on bin k, with
// pathloss already applied as an amplitude scale.
struct MultiuserChannel
{
    std::vector<arma::cx_mat> stacked; // users x tx_antennas per subcarrier
    arma::vec distance_km;             // per selected user
    arma::vec loss_db;
    arma::uvec cluster;

    int users() const { return static_cast<int>(stacked.empty() ? 0 : stacked.front().n_rows); }
    int subcarriers() const { return static_cast<int>(stacked.size()); }
};

MuEnvironment sample_mu_environment(const MuChannelParams& params, Rng& rng);

// Draws user distances uniformly over the disc (with the distance floor) and
// assigns each user to a uniformly random cluster.
MuUserSet sample_mu_users(int count, const MuChannelParams& params, Rng& rng);

// Draws fresh small-scale gains (variance tx_antennas/rays_per_cluster per
// ray) for the selected users and assembles their stacked channels. Users in
// the same cluster share ray response vectors but not gains.
MultiuserChannel realize_mu_channels(const MuEnvironment& environment, const MuUserSet& users,
                                     const arma::uvec& selected, int tx_antennas, int subcarriers,
                                     Rng& rng);

// Convenience wrapper: fresh environment, `users` fresh positions, and one
// channel realization covering all of them.
MultiuserChannel sample_multiuser_channel(int tx_antennas, int users, int subcarriers,
                                          const MuChannelParams& params, Rng& rng);

} // namespace beamkit

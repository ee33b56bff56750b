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

#include "beamkit/channel.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace beamkit
{

namespace
{

constexpr double two_pi = 6.283185307179586476925287;

// Laplacian scale parameter giving the requested standard deviation.
double laplacian_scale(double spread)
{
    return spread / std::sqrt(2.0);
}

double wrap_angle(double angle)
{
    const double wrapped = std::fmod(angle, two_pi);
    return wrapped < 0.0 ? wrapped + two_pi : wrapped;
}

} // namespace

// ---------- Geometric cluster model ----------

void PathSet::validate() const
{
    if (clusters < 1 || rays_per_cluster < 1)
        throw std::invalid_argument("PathSet: cluster and ray counts must be positive");
    const arma::uword paths = static_cast<arma::uword>(total_paths());
    if (gains.n_elem != paths || departure_angles.n_elem != paths || arrival_angles.n_elem != paths)
        throw std::invalid_argument("PathSet: gain/angle lists must hold one entry per path");
    if (cluster_delays.n_elem != static_cast<arma::uword>(clusters))
        throw std::invalid_argument("PathSet: one delay per cluster required");
    if (cluster_delays.n_elem && cluster_delays.min() < 0.0)
        throw std::invalid_argument("PathSet: delays must be nonnegative");
}

arma::cx_vec ula_response(double angle, int antennas, double spacing_over_wavelength)
{
    if (antennas < 1)
        throw std::invalid_argument("ula_response: antenna count must be positive");
    const double scale = 1.0 / std::sqrt(static_cast<double>(antennas));
    const double step = two_pi * spacing_over_wavelength * std::sin(angle);
    arma::cx_vec response(antennas);
    for (int n = 0; n < antennas; ++n)
        response(n) = std::polar(scale, step * static_cast<double>(n));
    return response;
}

PathSet sample_paths(const PathSamplingParams& params, int tx_antennas, int rx_antennas, Rng& rng)
{
    if (params.clusters < 1 || params.rays_per_cluster < 1)
        throw std::invalid_argument("sample_paths: cluster and ray counts must be positive");
    if (tx_antennas < 1 || rx_antennas < 1)
        throw std::invalid_argument("sample_paths: antenna counts must be positive");
    if (params.angular_spread < 0.0 || params.max_cluster_delay < 0.0)
        throw std::invalid_argument("sample_paths: spread and delay bound must be nonnegative");

    PathSet paths;
    paths.clusters = params.clusters;
    paths.rays_per_cluster = params.rays_per_cluster;
    const int total = paths.total_paths();
    paths.gains.set_size(total);
    paths.departure_angles.set_size(total);
    paths.arrival_angles.set_size(total);
    paths.cluster_delays.set_size(params.clusters);

    const double scale = laplacian_scale(params.angular_spread);

    // Geometry first, gains second, in a fixed order: runs that differ only
    // in the antenna counts then share the same draws up to the gain scale.
    for (int c = 0; c < params.clusters; ++c)
    {
        const double mean_aod = rng.uniform() * two_pi;
        const double mean_aoa = rng.uniform() * two_pi;
        paths.cluster_delays(c) = rng.uniform() * params.max_cluster_delay;
        for (int l = 0; l < params.rays_per_cluster; ++l)
        {
            const int p = c * params.rays_per_cluster + l;
            paths.departure_angles(p) = wrap_angle(mean_aod + rng.laplacian(scale));
            paths.arrival_angles(p) = wrap_angle(mean_aoa + rng.laplacian(scale));
        }
    }

    const double gain_std =
        std::sqrt(static_cast<double>(tx_antennas) * static_cast<double>(rx_antennas) /
                  static_cast<double>(total));
    for (int p = 0; p < total; ++p)
        paths.gains(p) = gain_std * rng.complex_normal(1.0);
    return paths;
}

// ---------- Frequency-selective realization ----------

arma::cx_mat realize_channel_reference(const PathSet& paths, int tx_antennas, int rx_antennas,
                                       int bin, int subcarriers)
{
    paths.validate();
    if (subcarriers < 1 || bin < 0 || bin >= subcarriers)
        throw std::invalid_argument("realize_channel_reference: bad subcarrier index");

    arma::cx_mat channel(rx_antennas, tx_antennas, arma::fill::zeros);
    for (int c = 0; c < paths.clusters; ++c)
    {
        const std::complex<double> delay_phase =
            std::polar(1.0, -two_pi * paths.cluster_delays(c) * static_cast<double>(bin) /
                                static_cast<double>(subcarriers));
        for (int l = 0; l < paths.rays_per_cluster; ++l)
        {
            const int p = c * paths.rays_per_cluster + l;
            const arma::cx_vec rx = ula_response(paths.arrival_angles(p), rx_antennas);
            const arma::cx_vec tx = ula_response(paths.departure_angles(p), tx_antennas);
            channel += (paths.gains(p) * delay_phase) * (rx * tx.t());
        }
    }
    return channel;
}

ChannelRealization realize_channel(const PathSet& paths, int tx_antennas, int rx_antennas,
                                   int subcarriers)
{
    paths.validate();
    if (subcarriers < 1)
        throw std::invalid_argument("realize_channel: subcarrier count must be positive");

    ChannelRealization realization;
    realization.paths = paths;
    const int total = paths.total_paths();
    realization.tx_responses.set_size(tx_antennas, total);
    realization.rx_responses.set_size(rx_antennas, total);
    for (int p = 0; p < total; ++p)
    {
        realization.tx_responses.col(p) = ula_response(paths.departure_angles(p), tx_antennas);
        realization.rx_responses.col(p) = ula_response(paths.arrival_angles(p), rx_antennas);
    }

    realization.subcarrier.reserve(subcarriers);
    arma::cx_vec phased(total);
    for (int k = 0; k < subcarriers; ++k)
    {
        for (int c = 0; c < paths.clusters; ++c)
        {
            const std::complex<double> delay_phase =
                std::polar(1.0, -two_pi * paths.cluster_delays(c) * static_cast<double>(k) /
                                    static_cast<double>(subcarriers));
            for (int l = 0; l < paths.rays_per_cluster; ++l)
            {
                const int p = c * paths.rays_per_cluster + l;
                phased(p) = paths.gains(p) * delay_phase;
            }
        }
        realization.subcarrier.push_back(realization.rx_responses * arma::diagmat(phased) *
                                         realization.tx_responses.t());
    }

#ifndef NDEBUG
    // Cross-check the product form against the explicit path sum on the edge bins.
    for (const int k : {0, subcarriers - 1})
    {
        const arma::cx_mat reference =
            realize_channel_reference(paths, tx_antennas, rx_antennas, k, subcarriers);
        const double scale = std::max(arma::norm(reference, "fro"), 1e-12);
        if (arma::norm(realization.subcarrier[static_cast<std::size_t>(k)] - reference, "fro") >
            1e-10 * scale)
            throw std::runtime_error("realize_channel: product and sum forms disagree");
    }
#endif
    return realization;
}

double pathloss_db(double distance_km)
{
    if (!(distance_km > 0.0))
        throw std::invalid_argument("pathloss_db: distance must be positive");
    return 128.1 + 37.6 * std::log10(distance_km);
}

// ---------- Multiuser downlink channel ----------

MuEnvironment sample_mu_environment(const MuChannelParams& params, Rng& rng)
{
    if (params.env_clusters < 1 || params.rays_per_cluster < 1)
        throw std::invalid_argument("sample_mu_environment: cluster and ray counts must be positive");

    MuEnvironment environment;
    environment.ray_departure_angles.set_size(params.rays_per_cluster, params.env_clusters);
    environment.cluster_delays.set_size(params.env_clusters);
    const double scale = laplacian_scale(params.angular_spread);
    for (int c = 0; c < params.env_clusters; ++c)
    {
        const double mean = rng.uniform() * two_pi;
        environment.cluster_delays(c) = rng.uniform() * params.max_cluster_delay;
        for (int l = 0; l < params.rays_per_cluster; ++l)
            environment.ray_departure_angles(l, c) = wrap_angle(mean + rng.laplacian(scale));
    }
    return environment;
}

MuUserSet sample_mu_users(int count, const MuChannelParams& params, Rng& rng)
{
    if (count < 1)
        throw std::invalid_argument("sample_mu_users: user count must be positive");
    if (!(params.radius_km >= 0.0) || !(params.min_distance_km > 0.0))
        throw std::invalid_argument("sample_mu_users: bad cell geometry");

    MuUserSet users;
    users.distance_km.set_size(count);
    users.loss_db.set_size(count);
    users.cluster.set_size(count);
    for (int n = 0; n < count; ++n)
    {
        // Uniform over the disc: radial density ~ r, i.e. r = R*sqrt(u).
        const double radial = params.radius_km * std::sqrt(rng.uniform());
        users.distance_km(n) = std::max(radial, params.min_distance_km);
        users.loss_db(n) = pathloss_db(users.distance_km(n));
        users.cluster(n) = rng.uniform_index(static_cast<std::size_t>(params.env_clusters));
    }
    return users;
}

MultiuserChannel realize_mu_channels(const MuEnvironment& environment, const MuUserSet& users,
                                     const arma::uvec& selected, int tx_antennas, int subcarriers,
                                     Rng& rng)
{
    if (tx_antennas < 1 || subcarriers < 1)
        throw std::invalid_argument("realize_mu_channels: counts must be positive");
    if (selected.is_empty())
        throw std::invalid_argument("realize_mu_channels: no users selected");
    for (const arma::uword u : selected)
        if (u >= users.distance_km.n_elem)
            throw std::invalid_argument("realize_mu_channels: selected user index out of range");

    const int rays = static_cast<int>(environment.ray_departure_angles.n_rows);
    const int count = static_cast<int>(selected.n_elem);

    MultiuserChannel channel;
    channel.distance_km.set_size(count);
    channel.loss_db.set_size(count);
    channel.cluster.set_size(count);

    // Flat-bin rows first (delay phases applied per bin afterwards).
    arma::cx_mat base(count, tx_antennas);
    const double gain_std = std::sqrt(static_cast<double>(tx_antennas) / static_cast<double>(rays));
    for (int n = 0; n < count; ++n)
    {
        const arma::uword user = selected(static_cast<arma::uword>(n));
        channel.distance_km(n) = users.distance_km(user);
        channel.loss_db(n) = users.loss_db(user);
        channel.cluster(n) = users.cluster(user);

        const double amplitude = std::pow(10.0, -users.loss_db(user) / 20.0);
        arma::cx_rowvec row(tx_antennas, arma::fill::zeros);
        for (int l = 0; l < rays; ++l)
        {
            const std::complex<double> gain = gain_std * rng.complex_normal(1.0);
            const double angle = environment.ray_departure_angles(l, users.cluster(user));
            row += gain * ula_response(angle, tx_antennas).t();
        }
        base.row(n) = amplitude * row;
    }

    channel.stacked.reserve(subcarriers);
    for (int k = 0; k < subcarriers; ++k)
    {
        arma::cx_mat stacked = base;
        for (int n = 0; n < count; ++n)
        {
            const double delay = environment.cluster_delays(channel.cluster(n));
            stacked.row(n) *= std::polar(1.0, -two_pi * delay * static_cast<double>(k) /
                                                  static_cast<double>(subcarriers));
        }
        channel.stacked.push_back(std::move(stacked));
    }
    return channel;
}

MultiuserChannel sample_multiuser_channel(int tx_antennas, int users, int subcarriers,
                                          const MuChannelParams& params, Rng& rng)
{
    const MuEnvironment environment = sample_mu_environment(params, rng);
    const MuUserSet positions = sample_mu_users(users, params, rng);
    return realize_mu_channels(environment, positions,
                               arma::regspace<arma::uvec>(0, static_cast<arma::uword>(users) - 1),
                               tx_antennas, subcarriers, rng);
}

} // namespace beamkit

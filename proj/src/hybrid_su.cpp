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

#include "beamkit/hybrid_su.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "beamkit/numerics.hpp"

namespace beamkit
{

namespace
{

constexpr double two_pi = 6.283185307179586476925287;

void require_psd(const arma::cx_mat& m, const char* who)
{
    require_finite(m, who);
    if (!m.is_square())
        throw std::invalid_argument(std::string(who) + ": matrix is not square");
    const double scale = arma::norm(m, "fro");
    if (arma::norm(m - m.t(), "fro") > 1e-10 * std::max(scale, 1e-12))
        throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian");
    arma::vec ev;
    if (!arma::eig_sym(ev, 0.5 * (m + m.t())))
        throw std::runtime_error(std::string(who) + ": eigenvalue check failed");
    if (ev.n_elem && ev.min() < -1e-10 * std::max(std::abs(ev.max()), 1e-12))
        throw std::invalid_argument(std::string(who) + ": matrix is not positive semidefinite");
}

// One unit-modulus entry drawn for the given resolution.
std::complex<double> random_phase(Rng& rng, int phase_bits)
{
    if (phase_bits == infinite_resolution)
        return std::polar(1.0, two_pi * rng.uniform());
    const std::size_t count = std::size_t(1) << phase_bits;
    return std::polar(1.0, two_pi / double(count) * double(rng.uniform_index(count)));
}

} // namespace

// ---------- Analog-stage design (coordinate descent) ----------

arma::cx_mat average_covariance(const std::vector<arma::cx_mat>& channels)
{
    if (channels.empty())
        throw std::invalid_argument("average_covariance: no subcarrier channels");
    const arma::uword cols = channels.front().n_cols;
    arma::cx_mat acc(cols, cols, arma::fill::zeros);
    for (const arma::cx_mat& h : channels)
    {
        if (h.n_cols != cols)
            throw std::invalid_argument("average_covariance: inconsistent channel dimensions");
        acc += h.t() * h;
    }
    acc /= double(channels.size());
    return 0.5 * (acc + acc.t());
}

double analog_objective(const arma::cx_mat& analog, const arma::cx_mat& avg_cov,
                        double gain_over_noise)
{
    if (!(gain_over_noise > 0.0))
        throw std::invalid_argument("analog_objective: gain-to-noise ratio must be positive");
    if (analog.n_rows != avg_cov.n_rows)
        throw std::invalid_argument("analog_objective: dimension mismatch");
    arma::cx_mat inner = gain_over_noise * (analog.t() * avg_cov * analog);
    inner = 0.5 * (inner + inner.t());
    inner.diag() += 1.0;
    return logdet_psd(inner) / std::numbers::ln2;
}

AnalogDesignResult design_analog(const arma::cx_mat& avg_cov, const StructureMask& mask,
                                 double gain_over_noise, int phase_bits,
                                 const AnalogDesignOptions& opts)
{
    require_psd(avg_cov, "design_analog");
    if (static_cast<int>(avg_cov.n_rows) != mask.rows)
        throw std::invalid_argument("design_analog: mask does not match the covariance dimension");
    if (!(gain_over_noise > 0.0))
        throw std::invalid_argument("design_analog: gain-to-noise ratio must be positive");
    if (opts.max_sweeps < 1)
        throw std::invalid_argument("design_analog: need at least one sweep");

    // Only the product of gain and covariance matters to the search.
    const arma::cx_mat m = gain_over_noise * 0.5 * (avg_cov + avg_cov.t());
    const int rows = mask.rows;
    const int cols = mask.cols;

    AnalogDesignResult result;
    Rng rng(opts.init_seed);
    result.analog.zeros(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i)
            if (mask.allows(i, j))
                result.analog(i, j) = random_phase(rng, phase_bits);

    const auto objective = [&m](const arma::cx_mat& v) {
        arma::cx_mat inner = v.t() * m * v;
        inner = 0.5 * (inner + inner.t());
        inner.diag() += 1.0;
        return logdet_psd(inner) / std::numbers::ln2;
    };

    double previous = objective(result.analog);
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep)
    {
        int changes = 0;
        for (int j = 0; j < cols; ++j)
        {
            // Per-column quantities: removing column j leaves them fixed while
            // the entries of that column are updated one by one.
            arma::cx_mat rest = result.analog;
            rest.shed_col(static_cast<arma::uword>(j));
            const arma::cx_mat mixed = m * rest;
            arma::cx_mat cross = arma::cx_mat(rest.t() * mixed);
            cross = 0.5 * (cross + cross.t());
            cross.diag() += 1.0;
            const arma::cx_mat coupling = m - mixed * arma::solve(cross, mixed.t());

            for (int i = 0; i < rows; ++i)
            {
                if (!mask.allows(i, j))
                    continue;
                const std::complex<double> eta =
                    arma::as_scalar(coupling.row(i) * result.analog.col(j)) -
                    coupling(i, i) * result.analog(i, j);

                std::complex<double> updated;
                if (phase_bits == infinite_resolution)
                {
                    updated = eta == std::complex<double>(0.0)
                                  ? std::complex<double>(1.0, 0.0)
                                  : eta / std::abs(eta);
                }
                else
                {
                    // The per-entry objective grows with Re{conj(entry)*eta},
                    // so a quantized candidate is kept only when that score
                    // does not drop below the current entry's score.
                    updated = quantize_phase(eta, phase_bits);
                    const double gain = (std::conj(updated) * eta).real();
                    const double current = (std::conj(result.analog(i, j)) * eta).real();
                    if (gain < current)
                        updated = result.analog(i, j);
                }
                if (updated != result.analog(i, j))
                    ++changes;
                result.analog(i, j) = updated;
                if (opts.record_update_objectives)
                    result.update_objectives.push_back(objective(result.analog));
            }
        }

        const double current = objective(result.analog);
        result.sweep_objectives.push_back(current);
        result.sweeps = sweep + 1;
        if (phase_bits == infinite_resolution)
        {
            if (current - previous <= opts.rel_tol * std::max(std::abs(current), 1e-12))
                break;
        }
        else if (changes == 0)
        {
            break;
        }
        previous = current;
    }
    return result;
}

AnalogDesignResult design_analog_combiner(const arma::cx_mat& avg_cov, const StructureMask& mask,
                                          double noise_power, double tau, int phase_bits,
                                          const AnalogDesignOptions& opts)
{
    if (!(noise_power > 0.0) || !(tau > 0.0))
        throw std::invalid_argument("design_analog_combiner: noise power and tau must be positive");
    return design_analog(avg_cov, mask, 1.0 / (noise_power * tau), phase_bits, opts);
}

// ---------- Digital stages ----------

arma::cx_mat digital_precoder(const arma::cx_mat& channel_bin, const arma::cx_mat& analog,
                              int streams, double power, double noise_power, bool equal_power)
{
    if (streams < 1 || streams > static_cast<int>(analog.n_cols) ||
        streams > static_cast<int>(channel_bin.n_rows))
        throw std::invalid_argument("digital_precoder: stream count out of range");
    if (!(power > 0.0) || !(noise_power > 0.0))
        throw std::invalid_argument("digital_precoder: powers must be positive");
    if (channel_bin.n_cols != analog.n_rows)
        throw std::invalid_argument("digital_precoder: channel and analog stage do not match");

    arma::cx_mat gram = analog.t() * analog;
    gram = 0.5 * (gram + gram.t());

    // Whiten on the numerically effective column space of the analog stage
    // (the symmetric square root, restricted to eigendirections above 1e-12
    // of the leading eigenvalue).  Coarse phase quantization can collapse
    // analog columns onto each other; the digital stage then works inside
    // the surviving subspace and leaves the redundant coordinates silent.
    const EigResult basis = hermitian_eig(gram);
    const double leading = basis.eigenvalues.max();
    if (!(leading > 0.0))
        throw std::invalid_argument("digital_precoder: analog stage is zero");
    arma::uword rank = 0;
    while (rank < basis.eigenvalues.n_elem &&
           basis.eigenvalues(rank) > leading * 1e-12)
        ++rank;
    const arma::uword active = std::min<arma::uword>(static_cast<arma::uword>(streams), rank);
    const arma::cx_mat subspace = basis.eigenvectors.cols(0, rank - 1);
    const arma::cx_mat whitener =
        subspace * arma::diagmat(arma::pow(basis.eigenvalues.head(rank), -0.5));

    const arma::cx_mat whitened = channel_bin * analog * whitener;
    const SvdResult decomposition = svd(whitened);
    const arma::cx_mat directions = decomposition.right.cols(0, active - 1);

    arma::cx_mat digital(analog.n_cols, static_cast<arma::uword>(streams), arma::fill::zeros);
    if (equal_power)
    {
        // Fixed per-stream scale absorbing the whitening: the analog Gram's
        // trace equals tx_antennas*rf_chains (fully-connected) or tx_antennas
        // (partially-connected), so one formula covers both layouts. Power is
        // only ever scaled down to stay within the budget.
        const double scale = std::sqrt(power / arma::trace(gram).real());
        digital.cols(0, active - 1) = scale * (subspace * directions);
        const double used = arma::trace(digital.t() * gram * digital).real();
        if (used > power)
            digital *= std::sqrt(power / used);
        return digital;
    }

    arma::vec gains(static_cast<arma::uword>(streams), arma::fill::zeros);
    for (arma::uword s = 0; s < active; ++s)
    {
        if (s < decomposition.singular_values.n_elem)
        {
            const double sv = decomposition.singular_values(s);
            gains(s) = sv * sv / noise_power;
        }
    }
    if (gains.max() <= 0.0)
        return digital; // the channel is invisible through the analog stage
    const PowerAllocation allocation = water_filling(gains, power);
    digital.cols(0, active - 1) =
        whitener * directions * arma::diagmat(arma::sqrt(allocation.powers.head(active)));
    return digital;
}

arma::cx_mat combiner_covariance(const std::vector<arma::cx_mat>& channels,
                                 const std::vector<arma::cx_mat>& tx_matrices)
{
    if (channels.empty() || channels.size() != tx_matrices.size())
        throw std::invalid_argument("combiner_covariance: need one transmit matrix per subcarrier");
    const arma::uword rows = channels.front().n_rows;
    arma::cx_mat acc(rows, rows, arma::fill::zeros);
    for (std::size_t k = 0; k < channels.size(); ++k)
    {
        if (channels[k].n_rows != rows || channels[k].n_cols != tx_matrices[k].n_rows)
            throw std::invalid_argument("combiner_covariance: inconsistent dimensions");
        const arma::cx_mat steered = channels[k] * tx_matrices[k];
        acc += steered * steered.t();
    }
    acc /= double(channels.size());
    return 0.5 * (acc + acc.t());
}

arma::cx_mat mmse_combiner(const arma::cx_mat& channel_bin, const arma::cx_mat& tx_bin,
                           const arma::cx_mat& analog_combiner, double noise_power)
{
    if (!(noise_power > 0.0))
        throw std::invalid_argument("mmse_combiner: noise power must be positive");
    if (channel_bin.n_cols != tx_bin.n_rows || channel_bin.n_rows != analog_combiner.n_rows)
        throw std::invalid_argument("mmse_combiner: dimension mismatch");

    const arma::cx_mat steered = analog_combiner.t() * (channel_bin * tx_bin);
    arma::cx_mat denom = steered * steered.t() + noise_power * (analog_combiner.t() * analog_combiner);
    denom = 0.5 * (denom + denom.t());
    arma::cx_mat digital;
    if (!arma::solve(digital, denom, steered, arma::solve_opts::no_approx))
    {
        // A rank-deficient analog combiner (e.g. coarse quantization collapsing
        // two columns onto the same pattern) makes the covariance singular, but
        // the system stays consistent: both sides live in the combiner's column
        // space.  The minimum-norm solution is then the right MMSE combiner.
        digital = arma::pinv(denom) * steered;
    }
    return digital;
}

// ---------- End-to-end designs ----------

namespace
{

double equal_power_scale(const ArchitectureSpec& spec)
{
    const double denom = spec.structure == Structure::fully_connected
                             ? double(spec.tx_antennas) * double(spec.rf_chains)
                             : double(spec.tx_antennas);
    return std::sqrt(spec.tx_power / denom);
}

void require_matching(const ChannelRealization& channel, const ArchitectureSpec& spec)
{
    if (channel.subcarriers() != spec.subcarriers || channel.tx_antennas() != spec.tx_antennas ||
        channel.rx_antennas() != spec.rx_antennas)
        throw std::invalid_argument("channel realization does not match the architecture");
}

} // namespace

HybridBeamformer design_hybrid_link(const ChannelRealization& channel, const ArchitectureSpec& spec,
                                    const SuDesignOptions& opts)
{
    spec.validate();
    require_matching(channel, spec);

    const double gain_over_noise = equal_power_scale(spec) * equal_power_scale(spec) /
                                   spec.noise_power;

    HybridBeamformer designed;
    designed.power_scale = equal_power_scale(spec);

    const arma::cx_mat tx_cov = average_covariance(channel.subcarrier);
    designed.analog_precoder =
        design_analog(tx_cov, spec.tx_mask(), gain_over_noise, spec.phase_bits, opts.analog).analog;

    designed.digital_precoders.reserve(static_cast<std::size_t>(spec.subcarriers));
    for (int k = 0; k < spec.subcarriers; ++k)
        designed.digital_precoders.push_back(
            digital_precoder(channel.subcarrier[static_cast<std::size_t>(k)],
                             designed.analog_precoder, spec.streams, spec.tx_power,
                             spec.noise_power, opts.equal_power));

    if (opts.tx_only)
        return designed;

    std::vector<arma::cx_mat> tx_matrices;
    tx_matrices.reserve(static_cast<std::size_t>(spec.subcarriers));
    for (int k = 0; k < spec.subcarriers; ++k)
        tx_matrices.push_back(designed.tx_matrix(static_cast<std::size_t>(k)));

    const arma::cx_mat rx_cov = combiner_covariance(channel.subcarrier, tx_matrices);
    const double tau = spec.structure == Structure::fully_connected
                           ? double(spec.rx_antennas)
                           : double(spec.rx_antennas) / double(spec.rf_chains);
    AnalogDesignOptions combiner_opts = opts.analog;
    combiner_opts.init_seed = opts.analog.init_seed + 1;
    designed.analog_combiner = design_analog_combiner(rx_cov, spec.rx_mask(), spec.noise_power,
                                                      tau, spec.phase_bits, combiner_opts)
                                   .analog;

    designed.digital_combiners.reserve(static_cast<std::size_t>(spec.subcarriers));
    for (int k = 0; k < spec.subcarriers; ++k)
        designed.digital_combiners.push_back(
            mmse_combiner(channel.subcarrier[static_cast<std::size_t>(k)],
                          tx_matrices[static_cast<std::size_t>(k)], designed.analog_combiner,
                          spec.noise_power));
    return designed;
}

HybridBeamformer asymptotic_design(const ChannelRealization& channel, const ArchitectureSpec& spec)
{
    spec.validate();
    require_matching(channel, spec);
    if (spec.structure != Structure::fully_connected)
        throw std::invalid_argument("asymptotic_design: defined for the fully-connected layout only");
    if (spec.phase_bits != infinite_resolution)
        throw std::invalid_argument("asymptotic_design: defined for unquantized phase shifters");
    if (channel.paths.total_paths() < spec.rf_chains)
        throw std::invalid_argument("asymptotic_design: fewer propagation paths than RF chains");

    // Strongest paths by squared gain; ties keep the lower path index.  Every
    // available RF chain carries one steering beam, so architectures with more
    // chains than streams still use all of their hardware.
    std::vector<int> order(static_cast<std::size_t>(channel.paths.total_paths()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::norm(channel.paths.gains(a)) > std::norm(channel.paths.gains(b));
    });
    order.resize(static_cast<std::size_t>(spec.rf_chains));

    HybridBeamformer designed;
    designed.analog_precoder.set_size(spec.tx_antennas, spec.rf_chains);
    designed.analog_combiner.set_size(spec.rx_antennas, spec.rf_chains);
    for (int s = 0; s < spec.rf_chains; ++s)
    {
        const arma::uword p = static_cast<arma::uword>(order[static_cast<std::size_t>(s)]);
        designed.analog_precoder.col(s) =
            std::sqrt(double(spec.tx_antennas)) * channel.tx_responses.col(p);
        designed.analog_combiner.col(s) =
            std::sqrt(double(spec.rx_antennas)) * channel.rx_responses.col(p);
    }

    // The path geometry fixes the analog stages; each subcarrier then gets
    // the standard closed-form water-filling digital stage over the steered
    // effective channel, mapping the rf_chains beams onto the streams.  For
    // asymptotically large arrays the selected beams become orthogonal and
    // this degenerates to a diagonal power loading over the strongest beams;
    // at finite array sizes it also compensates the overlap between beams and
    // picks the best per-subcarrier combination of them.
    designed.digital_precoders.reserve(static_cast<std::size_t>(spec.subcarriers));
    for (int k = 0; k < spec.subcarriers; ++k)
        designed.digital_precoders.push_back(
            digital_precoder(channel.subcarrier[static_cast<std::size_t>(k)],
                             designed.analog_precoder, spec.streams, spec.tx_power,
                             spec.noise_power, false));
    designed.digital_combiners.reserve(static_cast<std::size_t>(spec.subcarriers));
    for (int k = 0; k < spec.subcarriers; ++k)
        designed.digital_combiners.push_back(
            mmse_combiner(channel.subcarrier[static_cast<std::size_t>(k)],
                          designed.tx_matrix(static_cast<std::size_t>(k)),
                          designed.analog_combiner, spec.noise_power));
    return designed;
}

} // namespace beamkit

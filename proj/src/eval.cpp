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
// Rate formulas, method evaluation, and the Monte Carlo drivers.

#include "beamkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "beamkit/hybrid_su.hpp"
#include "beamkit/mu_miso.hpp"
#include "beamkit/numerics.hpp"
#include "beamkit/rng.hpp"

namespace beamkit
{

namespace
{

constexpr double kLn2 = 0.6931471805599453;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

arma::cx_mat symmetrized(const arma::cx_mat& m) { return 0.5 * (m + m.t()); }

double deg_to_rad(double degrees) { return degrees * arma::datum::pi / 180.0; }

} // namespace

// ---------- Spectral-efficiency formulas ----------

double rate_su(const arma::cx_mat& channel_bin, const arma::cx_mat& tx, const arma::cx_mat& rx,
               double noise_power)
{
    if (!(noise_power > 0.0))
        throw std::invalid_argument("rate_su: noise power must be positive");
    if (channel_bin.n_cols != tx.n_rows || channel_bin.n_rows != rx.n_rows ||
        tx.n_cols != rx.n_cols)
        throw std::invalid_argument("rate_su: mismatched channel/precoder/combiner shapes");

    if (tx.n_cols == 0)
        return 0.0;

    // Project the received signal onto the combiner's column space.  The
    // combiner may be rank-deficient (coarse phase quantization can collapse
    // analog columns onto each other); the achievable rate is then the one
    // of the surviving subspace.  Directions below 1e-12 of the leading
    // singular value are treated as numerically lost.
    const SvdResult basis = svd(rx);
    const double leading = basis.singular_values.max();
    if (!(leading > 0.0))
        return 0.0;
    arma::uword rank = 0;
    while (rank < basis.singular_values.n_elem &&
           basis.singular_values(rank) > leading * 1e-12)
        ++rank;

    const arma::cx_mat subspace = basis.left.cols(0, rank - 1);
    const arma::cx_mat steered = subspace.t() * (channel_bin * tx);
    const arma::cx_mat inner =
        symmetrized(arma::cx_mat(arma::eye<arma::cx_mat>(rank, rank) +
                                 (steered * steered.t()) / noise_power));
    return logdet_psd(inner) / kLn2;
}

double rate_su_ideal(const arma::cx_mat& channel_bin, const arma::cx_mat& tx, double noise_power)
{
    if (!(noise_power > 0.0))
        throw std::invalid_argument("rate_su_ideal: noise power must be positive");
    if (channel_bin.n_cols != tx.n_rows)
        throw std::invalid_argument("rate_su_ideal: mismatched channel/precoder shapes");

    const arma::cx_mat through = channel_bin * tx;
    const arma::uword streams = tx.n_cols;
    const arma::cx_mat inner =
        symmetrized(arma::cx_mat(arma::eye<arma::cx_mat>(streams, streams) +
                                 (through.t() * through) / noise_power));
    return logdet_psd(inner) / kLn2;
}

double mean_rate(const ChannelRealization& channel, const HybridBeamformer& beamformer,
                 double noise_power)
{
    if (channel.subcarrier.empty())
        throw std::invalid_argument("mean_rate: empty channel realization");
    double total = 0.0;
    for (std::size_t k = 0; k < channel.subcarrier.size(); ++k)
    {
        if (beamformer.has_combiner())
            total += rate_su(channel.subcarrier[k], beamformer.tx_matrix(k),
                             beamformer.rx_matrix(k), noise_power);
        else
            total += rate_su_ideal(channel.subcarrier[k], beamformer.tx_matrix(k), noise_power);
    }
    return total / double(channel.subcarrier.size());
}

// ---------- Fully-digital baseline ----------

FullyDigitalResult fully_digital_baseline(const ChannelRealization& channel, int streams,
                                          double tx_power, double noise_power)
{
    if (streams < 1)
        throw std::invalid_argument("fully_digital_baseline: streams must be positive");
    if (!(tx_power > 0.0) || !(noise_power > 0.0))
        throw std::invalid_argument("fully_digital_baseline: powers must be positive");
    if (channel.subcarrier.empty())
        throw std::invalid_argument("fully_digital_baseline: empty channel realization");
    const arma::uword rank_cap =
        std::min(channel.subcarrier.front().n_rows, channel.subcarrier.front().n_cols);
    if (static_cast<arma::uword>(streams) > rank_cap)
        throw std::invalid_argument("fully_digital_baseline: more streams than channel rank");

    FullyDigitalResult result;
    result.precoders.reserve(channel.subcarrier.size());
    for (const auto& bin : channel.subcarrier)
    {
        const SvdResult decomposition = svd(bin);
        const arma::vec modes = decomposition.singular_values.head(streams);
        const arma::vec gains = arma::square(modes) / noise_power;
        arma::vec powers(static_cast<arma::uword>(streams), arma::fill::zeros);
        if (gains.max() > 0.0)
            powers = water_filling(gains, tx_power).powers;
        for (arma::uword i = 0; i < powers.n_elem; ++i)
            result.mean_rate += std::log1p(powers(i) * gains(i)) / kLn2;
        result.precoders.push_back(
            decomposition.right.cols(0, static_cast<arma::uword>(streams) - 1) *
            arma::diagmat(arma::conv_to<arma::cx_vec>::from(arma::sqrt(powers))));
    }
    result.mean_rate /= double(channel.subcarrier.size());
    return result;
}

// ---------- Unit conversions ----------

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double per_subcarrier_dbm(double psd_dbm_hz, double bandwidth_mhz, int subcarriers)
{
    if (!(bandwidth_mhz > 0.0) || subcarriers < 1)
        throw std::invalid_argument("per_subcarrier_dbm: bad bandwidth or subcarrier count");
    return psd_dbm_hz + 10.0 * std::log10(bandwidth_mhz * 1e6 / double(subcarriers));
}

// ---------- Per-trial evaluation ----------

namespace
{

// One method on one single-user channel realization; arch carries the
// method's structure/quantization overrides plus the axis power and noise.
double evaluate_su(const Scenario& scenario, const MethodSpec& method,
                   const ChannelRealization& channel, const ArchitectureSpec& arch,
                   std::uint64_t trial_seed)
{
    switch (method.base)
    {
    case MethodSpec::Base::fully_digital:
        return fully_digital_baseline(channel, arch.streams, arch.tx_power, arch.noise_power)
            .mean_rate;
    case MethodSpec::Base::asymptotic:
        return mean_rate(channel, asymptotic_design(channel, arch), arch.noise_power);
    case MethodSpec::Base::hybrid:
    {
        SuDesignOptions opts;
        opts.analog.init_seed = trial_seed;
        opts.equal_power = scenario.equal_power;
        opts.tx_only = method.tx_only;
        return mean_rate(channel, design_hybrid_link(channel, arch, opts), arch.noise_power);
    }
    }
    throw std::logic_error("evaluate_su: unreachable");
}

// Single-user matched-filter rate of user n, mean over subcarriers; the
// cheap estimate behind the static weight protocol.
double matched_filter_rate(const MultiuserChannel& channel, arma::uword user, double tx_power,
                           double noise_power)
{
    double total = 0.0;
    for (const auto& bin : channel.stacked)
    {
        const double gain = arma::accu(arma::square(arma::abs(bin.row(user))));
        total += std::log1p(tx_power * gain / noise_power) / kLn2;
    }
    return total / double(channel.stacked.size());
}

MultiuserChannel truncate_antennas(const MultiuserChannel& channel, int limit)
{
    MultiuserChannel out = channel;
    for (auto& bin : out.stacked)
        bin = arma::cx_mat(bin.head_cols(static_cast<arma::uword>(limit)));
    return out;
}

// One method on one multiuser drop: design, then unweighted sum rate.
double evaluate_mu(const MethodSpec& method, const MultiuserChannel& channel,
                   const arma::vec& weights, double tx_power, double noise_power,
                   std::uint64_t trial_seed)
{
    if (method.base == MethodSpec::Base::fully_digital)
    {
        const int width = static_cast<int>(channel.stacked.front().n_cols);
        const bool trim = method.mu_antenna_limit > 0 && method.mu_antenna_limit < width;
        const MultiuserChannel used =
            trim ? truncate_antennas(channel, method.mu_antenna_limit) : channel;
        const MuPrecoder design = fully_digital_wmmse(used, weights, tx_power, noise_power);
        return arma::accu(user_rates(used, design.analog, design.digital, noise_power));
    }
    MuDesignOptions opts;
    opts.analog.init_seed = trial_seed;
    const MuPrecoder design =
        hybrid_mu_design(channel, method.mu_rf_chains, weights, tx_power, noise_power, opts);
    return arma::accu(user_rates(channel, design.analog, design.digital, noise_power));
}

MuChannelParams mu_params_of(const Scenario& scenario)
{
    MuChannelParams params;
    params.env_clusters = scenario.env_clusters;
    params.rays_per_cluster = scenario.rays_per_cluster;
    params.angular_spread = deg_to_rad(scenario.angular_spread_deg);
    params.max_cluster_delay = scenario.delay_fraction * double(scenario.arch.subcarriers);
    params.radius_km = scenario.radius_km;
    params.min_distance_km = scenario.min_distance_km;
    return params;
}

// Per-axis operating point.
struct AxisPoint
{
    double value = 0.0;
    double tx_power = 1.0;
    double noise_power = 1.0;
    double reference_power = 0.0; // static-weight estimation PSD, multiuser only
    int antenna_override = 0;
};

std::vector<AxisPoint> axis_points(const Scenario& scenario)
{
    std::vector<AxisPoint> points;
    switch (scenario.mode)
    {
    case Mode::su_sweep_snr:
        for (const double snr : scenario.snr_db)
            points.push_back({snr, 1.0, std::pow(10.0, -snr / 10.0), 0.0, 0});
        break;
    case Mode::su_sweep_antennas:
        for (const int n : scenario.antennas)
            points.push_back(
                {double(n), 1.0, std::pow(10.0, -scenario.snr_db.front() / 10.0), 0.0, n});
        break;
    case Mode::mu_sum_rate:
    case Mode::mu_cdf:
        for (const double psd : scenario.tx_psd_dbm_hz)
        {
            AxisPoint point;
            point.value = psd;
            point.tx_power = dbm_to_watt(
                per_subcarrier_dbm(psd, scenario.bandwidth_mhz, scenario.arch.subcarriers));
            point.noise_power = dbm_to_watt(per_subcarrier_dbm(
                scenario.noise_psd_dbm_hz, scenario.bandwidth_mhz, scenario.arch.subcarriers));
            point.reference_power = dbm_to_watt(per_subcarrier_dbm(
                scenario.reference_psd_dbm_hz, scenario.bandwidth_mhz, scenario.arch.subcarriers));
            points.push_back(point);
        }
        break;
    }
    return points;
}

// Fills trial t of every method at one axis point.  All failures stay NaN.
void run_su_trial(const Scenario& scenario, const std::vector<MethodSpec>& methods,
                  const AxisPoint& point, int trial, std::vector<std::vector<double>>& values)
{
    try
    {
        Rng rng(scenario.seed + static_cast<std::uint64_t>(trial));
        const int tx = point.antenna_override > 0 ? point.antenna_override
                                                  : scenario.arch.tx_antennas;
        const int rx = point.antenna_override > 0 ? point.antenna_override
                                                  : scenario.arch.rx_antennas;
        PathSamplingParams params;
        params.clusters = scenario.clusters;
        params.rays_per_cluster = scenario.rays_per_cluster;
        params.angular_spread = deg_to_rad(scenario.angular_spread_deg);
        params.max_cluster_delay = scenario.delay_fraction * double(scenario.arch.subcarriers);
        const PathSet paths = sample_paths(params, tx, rx, rng);
        const ChannelRealization channel =
            realize_channel(paths, tx, rx, scenario.arch.subcarriers);

        for (std::size_t m = 0; m < methods.size(); ++m)
        {
            try
            {
                ArchitectureSpec arch =
                    arch_for_method(scenario, methods[m], point.antenna_override);
                arch.tx_power = point.tx_power;
                arch.noise_power = point.noise_power;
                const double rate = evaluate_su(scenario, methods[m], channel, arch,
                                                scenario.seed + static_cast<std::uint64_t>(trial));
                if (std::isfinite(rate))
                    values[m][static_cast<std::size_t>(trial)] = rate;
            }
            catch (...)
            {
            }
        }
    }
    catch (...)
    {
    }
}

void run_mu_trial(const Scenario& scenario, const std::vector<MethodSpec>& methods,
                  const AxisPoint& point, int trial, std::vector<std::vector<double>>& values)
{
    try
    {
        Rng rng(scenario.seed + static_cast<std::uint64_t>(trial));
        const MuChannelParams params = mu_params_of(scenario);
        const MuEnvironment environment = sample_mu_environment(params, rng);
        const MuUserSet users = sample_mu_users(scenario.users, params, rng);
        const arma::uvec everyone =
            arma::regspace<arma::uvec>(0, static_cast<arma::uword>(scenario.users) - 1);
        const MultiuserChannel channel =
            realize_mu_channels(environment, users, everyone, scenario.arch.tx_antennas,
                                scenario.arch.subcarriers, rng);

        arma::vec weights(static_cast<arma::uword>(scenario.users), arma::fill::ones);
        if (scenario.weight_protocol == WeightProtocol::inverse_expected)
        {
            arma::vec estimates(static_cast<arma::uword>(scenario.users), arma::fill::zeros);
            for (int redraw = 0; redraw < scenario.weight_redraws; ++redraw)
            {
                const MultiuserChannel probe =
                    realize_mu_channels(environment, users, everyone, scenario.arch.tx_antennas,
                                        scenario.arch.subcarriers, rng);
                for (arma::uword n = 0; n < estimates.n_elem; ++n)
                    estimates(n) += matched_filter_rate(probe, n, point.reference_power,
                                                        point.noise_power) /
                                    double(scenario.weight_redraws);
            }
            weights = adapt_weights(estimates);
        }

        for (std::size_t m = 0; m < methods.size(); ++m)
        {
            try
            {
                const double rate =
                    evaluate_mu(methods[m], channel, weights, point.tx_power, point.noise_power,
                                scenario.seed + static_cast<std::uint64_t>(trial));
                if (std::isfinite(rate))
                    values[m][static_cast<std::size_t>(trial)] = rate;
            }
            catch (...)
            {
            }
        }
    }
    catch (...)
    {
    }
}

CellStats reduce_cell(const std::vector<double>& trials)
{
    CellStats stats;
    double sum = 0.0;
    for (const double v : trials)
    {
        if (std::isfinite(v))
        {
            sum += v;
            ++stats.successes;
        }
        else
            ++stats.failed;
    }
    if (stats.successes == 0)
    {
        stats.mean = kNaN;
        stats.std_error = kNaN;
        return stats;
    }
    stats.mean = sum / double(stats.successes);
    if (stats.successes < 2)
    {
        stats.std_error = kNaN;
        return stats;
    }
    double squares = 0.0;
    for (const double v : trials)
        if (std::isfinite(v))
            squares += (v - stats.mean) * (v - stats.mean);
    stats.std_error =
        std::sqrt(squares / double(stats.successes - 1) / double(stats.successes));
    return stats;
}

SweepResult sweep_run(const Scenario& scenario, const MonteCarloOptions& opts, bool use_openmp)
{
    scenario.validate();
    if (scenario.mode == Mode::mu_cdf)
        throw std::invalid_argument("monte_carlo: the mu_cdf mode runs through run_mu_cdf");

    std::vector<MethodSpec> methods;
    methods.reserve(scenario.methods.size());
    for (const auto& token : scenario.methods)
        methods.push_back(parse_method(token, scenario.mode));

    const std::vector<AxisPoint> points = axis_points(scenario);
    const int trials = scenario.trials;

    SweepResult result;
    result.methods = scenario.methods;
    for (const auto& point : points)
        result.axis.push_back(point.value);
    result.trial_values.assign(
        points.size(),
        std::vector<std::vector<double>>(methods.size(),
                                         std::vector<double>(static_cast<std::size_t>(trials),
                                                             kNaN)));

    const bool multiuser = scenario.mode == Mode::mu_sum_rate;
    for (std::size_t a = 0; a < points.size(); ++a)
    {
        auto& values = result.trial_values[a];
        const AxisPoint& point = points[a];
        if (use_openmp)
        {
#pragma omp parallel for schedule(dynamic)
            for (int t = 0; t < trials; ++t)
            {
                if (multiuser)
                    run_mu_trial(scenario, methods, point, t, values);
                else
                    run_su_trial(scenario, methods, point, t, values);
            }
        }
        else
        {
            for (int t = 0; t < trials; ++t)
            {
                if (multiuser)
                    run_mu_trial(scenario, methods, point, t, values);
                else
                    run_su_trial(scenario, methods, point, t, values);
            }
        }

        // Serial reduction in trial order keeps the result independent of
        // the thread count.
        std::vector<CellStats> row;
        row.reserve(methods.size());
        for (std::size_t m = 0; m < methods.size(); ++m)
            row.push_back(reduce_cell(values[m]));
        result.cells.push_back(std::move(row));
    }

    if (!opts.keep_trials)
        result.trial_values.clear();
    return result;
}

} // namespace

// ---------- Monte Carlo drivers ----------

SweepResult monte_carlo(const Scenario& scenario, const MonteCarloOptions& opts)
{
    return sweep_run(scenario, opts, opts.run_parallel);
}

SweepResult monte_carlo_serial(const Scenario& scenario, const MonteCarloOptions& opts)
{
    return sweep_run(scenario, opts, false);
}

// ---------- Multiuser rate CDF ----------

CdfResult run_mu_cdf(const Scenario& scenario)
{
    scenario.validate();
    if (scenario.mode != Mode::mu_cdf)
        throw std::invalid_argument("run_mu_cdf: scenario mode is not mu_cdf");

    std::vector<MethodSpec> methods;
    for (const auto& token : scenario.methods)
        methods.push_back(parse_method(token, scenario.mode));

    const AxisPoint point = axis_points(scenario).front();
    const int population = scenario.population;
    const int served = scenario.users;
    const arma::uword pool_size = static_cast<arma::uword>(population);

    Rng rng(scenario.seed);
    const MuChannelParams params = mu_params_of(scenario);
    const MuEnvironment environment = sample_mu_environment(params, rng);
    const MuUserSet pool = sample_mu_users(population, params, rng);

    // Static expected-rate estimates for the whole pool, when requested.
    arma::vec pool_estimates(pool_size, arma::fill::zeros);
    if (scenario.weight_protocol == WeightProtocol::inverse_expected)
    {
        const arma::uvec everyone = arma::regspace<arma::uvec>(0, pool_size - 1);
        for (int redraw = 0; redraw < scenario.weight_redraws; ++redraw)
        {
            const MultiuserChannel probe =
                realize_mu_channels(environment, pool, everyone, scenario.arch.tx_antennas,
                                    scenario.arch.subcarriers, rng);
            for (arma::uword n = 0; n < pool_size; ++n)
                pool_estimates(n) +=
                    matched_filter_rate(probe, n, point.reference_power, point.noise_power) /
                    double(scenario.weight_redraws);
        }
    }

    std::vector<arma::vec> rate_sums(methods.size(), arma::vec(pool_size, arma::fill::zeros));
    std::vector<arma::vec> serve_counts(methods.size(), arma::vec(pool_size, arma::fill::zeros));

    std::vector<arma::uword> shuffle(pool_size);
    for (int slot = 0; slot < scenario.trials; ++slot)
    {
        // Method-independent scheduling and fading: every method sees the
        // same user subset and the same small-scale channel in each slot.
        std::iota(shuffle.begin(), shuffle.end(), arma::uword(0));
        arma::uvec selected(static_cast<arma::uword>(served));
        for (int i = 0; i < served; ++i)
        {
            const std::size_t j =
                static_cast<std::size_t>(i) +
                static_cast<std::size_t>(rng.uniform_index(population - i));
            std::swap(shuffle[static_cast<std::size_t>(i)], shuffle[j]);
            selected(static_cast<arma::uword>(i)) = shuffle[static_cast<std::size_t>(i)];
        }
        const MultiuserChannel channel =
            realize_mu_channels(environment, pool, selected, scenario.arch.tx_antennas,
                                scenario.arch.subcarriers, rng);

        for (std::size_t m = 0; m < methods.size(); ++m)
        {
            arma::vec weights(static_cast<arma::uword>(served), arma::fill::ones);
            switch (scenario.weight_protocol)
            {
            case WeightProtocol::equal:
                break;
            case WeightProtocol::inverse_expected:
                weights = adapt_weights(pool_estimates.elem(selected));
                break;
            case WeightProtocol::adaptive:
            {
                arma::vec history(static_cast<arma::uword>(served), arma::fill::zeros);
                for (int i = 0; i < served; ++i)
                {
                    const arma::uword user = selected(static_cast<arma::uword>(i));
                    if (serve_counts[m](user) > 0.0)
                        history(static_cast<arma::uword>(i)) =
                            rate_sums[m](user) / serve_counts[m](user);
                }
                weights = adapt_weights(history);
                break;
            }
            }

            try
            {
                const MethodSpec& method = methods[m];
                arma::vec rates;
                if (method.base == MethodSpec::Base::fully_digital)
                {
                    const int width = static_cast<int>(channel.stacked.front().n_cols);
                    const bool trim =
                        method.mu_antenna_limit > 0 && method.mu_antenna_limit < width;
                    const MultiuserChannel used =
                        trim ? truncate_antennas(channel, method.mu_antenna_limit) : channel;
                    const MuPrecoder design =
                        fully_digital_wmmse(used, weights, point.tx_power, point.noise_power);
                    rates = user_rates(used, design.analog, design.digital, point.noise_power);
                }
                else
                {
                    MuDesignOptions opts;
                    opts.analog.init_seed = scenario.seed + static_cast<std::uint64_t>(slot);
                    const MuPrecoder design =
                        hybrid_mu_design(channel, method.mu_rf_chains, weights, point.tx_power,
                                         point.noise_power, opts);
                    rates = user_rates(channel, design.analog, design.digital, point.noise_power);
                }
                if (!rates.is_finite())
                    continue;
                for (int i = 0; i < served; ++i)
                {
                    const arma::uword user = selected(static_cast<arma::uword>(i));
                    rate_sums[m](user) += rates(static_cast<arma::uword>(i));
                    serve_counts[m](user) += 1.0;
                }
            }
            catch (...)
            {
                // A failed design skips this slot for this method only.
            }
        }
    }

    CdfResult result;
    result.methods = scenario.methods;
    result.rates.resize(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m)
    {
        for (arma::uword user = 0; user < pool_size; ++user)
            if (serve_counts[m](user) > 0.0)
                result.rates[m].push_back(rate_sums[m](user) / serve_counts[m](user));
        std::sort(result.rates[m].begin(), result.rates[m].end());
    }
    return result;
}

CdfCurve rate_cdf(std::vector<double> values)
{
    values.erase(std::remove_if(values.begin(), values.end(),
                                [](double v) { return !std::isfinite(v); }),
                 values.end());
    std::sort(values.begin(), values.end());
    CdfCurve curve;
    curve.value = std::move(values);
    curve.probability.resize(curve.value.size());
    for (std::size_t i = 0; i < curve.probability.size(); ++i)
        curve.probability[i] = double(i + 1) / double(curve.probability.size());
    return curve;
}

} // namespace beamkit

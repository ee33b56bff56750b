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

#include "beamkit/mu_miso.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "beamkit/numerics.hpp"

namespace beamkit
{

namespace
{

// Transmit power of one subcarrier as a function of the multiplier, expressed
// through the eigendecomposition of the whitened quadratic term: each user
// contributes |r_n|^2 * sum_m |b(m,n)|^2 / (eigenvalue_m + multiplier)^2.
struct PowerCurve
{
    const arma::vec& eigenvalues;  // ascending, nonnegative up to rounding
    const arma::cx_mat& projected; // rf_chains x users, eigenbasis coordinates of user channels
    const arma::vec& strengths;    // |r_n|^2 per user

    double value(double multiplier) const
    {
        double total = 0.0;
        for (arma::uword n = 0; n < projected.n_cols; ++n)
        {
            double user = 0.0;
            for (arma::uword m = 0; m < eigenvalues.n_elem; ++m)
            {
                const double denom = std::max(eigenvalues(m), 0.0) + multiplier;
                user += std::norm(projected(m, n)) / (denom * denom);
            }
            total += strengths(n) * user;
        }
        return total;
    }

    double derivative(double multiplier) const
    {
        double total = 0.0;
        for (arma::uword n = 0; n < projected.n_cols; ++n)
        {
            double user = 0.0;
            for (arma::uword m = 0; m < eigenvalues.n_elem; ++m)
            {
                const double denom = std::max(eigenvalues(m), 0.0) + multiplier;
                user += std::norm(projected(m, n)) / (denom * denom * denom);
            }
            total += strengths(n) * user;
        }
        return -2.0 * total;
    }
};

// Smallest multiplier meeting the power budget: zero when the unconstrained
// solution fits, otherwise the root of value(multiplier) = power found by
// doubling, bisection, and a few Newton polishing steps.
double solve_multiplier(const PowerCurve& curve, double power, double power_at_zero)
{
    if (power_at_zero <= power)
        return 0.0;

    double hi = 1.0;
    while (curve.value(hi) > power)
    {
        hi *= 2.0;
        if (hi > 1e60)
            throw std::runtime_error("wmmse_digital: power constraint cannot be met");
    }
    double lo = hi > 1.0 ? hi / 2.0 : 0.0;
    for (int iter = 0; iter < 120 && hi - lo > 1e-12 * hi; ++iter)
    {
        const double mid = 0.5 * (lo + hi);
        (curve.value(mid) > power ? lo : hi) = mid;
    }
    double root = 0.5 * (lo + hi);
    for (int iter = 0; iter < 4; ++iter)
    {
        const double slope = curve.derivative(root);
        if (!(slope < 0.0))
            break;
        double next = root - (curve.value(root) - power) / slope;
        if (!std::isfinite(next))
            break;
        next = std::min(std::max(next, lo), hi);
        root = next;
    }
    return root;
}

// Eigenvalues below this fraction of the largest count as zero when deciding
// whether the unconstrained precoder exists.
constexpr double null_space_tol = 1e-12;

} // namespace

// ---------- Weighted-MMSE digital precoding ----------

WmmseResult wmmse_digital(const std::vector<arma::cx_mat>& effective, const arma::cx_mat& gram,
                          const arma::vec& weights, double power, double noise_power,
                          const WmmseOptions& opts)
{
    if (effective.empty())
        throw std::invalid_argument("wmmse_digital: no subcarriers");
    const arma::uword users = effective.front().n_rows;
    const arma::uword chains = effective.front().n_cols;
    for (const arma::cx_mat& g : effective)
        if (g.n_rows != users || g.n_cols != chains)
            throw std::invalid_argument("wmmse_digital: inconsistent effective-channel dimensions");
    if (weights.n_elem != users)
        throw std::invalid_argument("wmmse_digital: one weight per user required");
    if (weights.n_elem == 0 || weights.min() <= 0.0)
        throw std::invalid_argument("wmmse_digital: weights must be positive");
    if (!(power > 0.0) || !(noise_power > 0.0))
        throw std::invalid_argument("wmmse_digital: powers must be positive");
    if (gram.n_rows != chains || gram.n_cols != chains)
        throw std::invalid_argument("wmmse_digital: Gram matrix does not match the channel width");
    if (opts.max_iters < 1)
        throw std::invalid_argument("wmmse_digital: need at least one iteration");

    arma::cx_mat factor; // upper triangular, gram = factor^H * factor
    if (!arma::chol(factor, 0.5 * (gram + gram.t())))
        throw std::invalid_argument("wmmse_digital: analog Gram matrix is rank-deficient");

    const std::size_t bins = effective.size();
    const double ln2 = std::numbers::ln2;

    // Whitened user channels per subcarrier (rf_chains x users), and the
    // whitened precoders the iteration works on.
    std::vector<arma::cx_mat> whitened(bins);
    std::vector<arma::cx_mat> precoders(bins);
    for (std::size_t k = 0; k < bins; ++k)
    {
        whitened[k] = arma::solve(arma::trimatl(factor.t()), effective[k].t());
        const double base = arma::accu(arma::square(arma::abs(whitened[k])));
        // Matched-filter start scaled to the full budget.
        precoders[k] = base > 0.0 ? arma::cx_mat(std::sqrt(power / base) * whitened[k])
                                  : arma::cx_mat(chains, users, arma::fill::zeros);
    }

    const auto objective = [&]() {
        double total = 0.0;
        for (std::size_t k = 0; k < bins; ++k)
        {
            const arma::cx_mat inner = whitened[k].t() * precoders[k];
            for (arma::uword n = 0; n < users; ++n)
            {
                double interference = noise_power;
                for (arma::uword i = 0; i < users; ++i)
                    if (i != n)
                        interference += std::norm(inner(n, i));
                total += weights(n) *
                         std::log1p(std::norm(inner(n, n)) / interference) / ln2;
            }
        }
        return total / double(bins);
    };

    WmmseResult result;
    result.multipliers.zeros(bins);
    result.objective_trace.push_back(objective());

    arma::vec receive_gain(users);
    arma::cx_vec scalars(users);
    for (int iter = 0; iter < opts.max_iters; ++iter)
    {
        for (std::size_t k = 0; k < bins; ++k)
        {
            const arma::cx_mat& g = whitened[k];
            const arma::cx_mat inner = g.t() * precoders[k];

            // Scalar MMSE receivers, MSE weights, and the per-user factors
            // entering the precoder update.
            for (arma::uword n = 0; n < users; ++n)
            {
                double received = noise_power;
                for (arma::uword i = 0; i < users; ++i)
                    received += std::norm(inner(n, i));
                const std::complex<double> receiver = inner(n, n) / received;
                const double mse = 1.0 - std::norm(inner(n, n)) / received;
                const double mse_weight = 1.0 / mse;
                receive_gain(n) = weights(n) * mse_weight * std::norm(receiver);
                scalars(n) = weights(n) * mse_weight * receiver;
            }

            arma::cx_mat quad = g * arma::diagmat(receive_gain) * g.t();
            quad = 0.5 * (quad + quad.t());
            arma::vec eigenvalues;
            arma::cx_mat basis;
            if (!arma::eig_sym(eigenvalues, basis, quad))
                throw std::runtime_error("wmmse_digital: eigendecomposition failed");
            const arma::cx_mat projected = basis.t() * g;

            arma::vec strengths(users);
            for (arma::uword n = 0; n < users; ++n)
                strengths(n) = std::norm(scalars(n));

            // Feasibility of the unconstrained precoder: user channels must
            // lie in the span of the quadratic term (pseudo-inverse sense).
            const double eig_scale = eigenvalues.n_elem ? std::max(eigenvalues.max(), 0.0) : 0.0;
            const double zero_eig = null_space_tol * std::max(eig_scale, 1e-300);
            double power_at_zero = 0.0;
            for (arma::uword n = 0; n < users && std::isfinite(power_at_zero); ++n)
            {
                if (strengths(n) == 0.0)
                    continue;
                const double channel_scale = arma::accu(arma::square(arma::abs(projected.col(n))));
                double user = 0.0;
                for (arma::uword m = 0; m < eigenvalues.n_elem; ++m)
                {
                    const double component = std::norm(projected(m, n));
                    if (eigenvalues(m) > zero_eig)
                        user += component / (eigenvalues(m) * eigenvalues(m));
                    else if (component > null_space_tol * channel_scale)
                        user = std::numeric_limits<double>::infinity();
                }
                power_at_zero += strengths(n) * user;
            }

            const PowerCurve curve{eigenvalues, projected, strengths};
            const double multiplier = solve_multiplier(curve, power, power_at_zero);
            result.multipliers(k) = multiplier;

            for (arma::uword n = 0; n < users; ++n)
            {
                arma::cx_vec coords = projected.col(n);
                for (arma::uword m = 0; m < eigenvalues.n_elem; ++m)
                {
                    const double denom = std::max(eigenvalues(m), 0.0) + multiplier;
                    coords(m) = denom > zero_eig ? coords(m) / denom : std::complex<double>(0.0);
                }
                precoders[k].col(n) = scalars(n) * (basis * coords);
            }
        }

        result.iterations = iter + 1;
        const double current = objective();
        const double previous = result.objective_trace.back();
        result.objective_trace.push_back(current);
        if (current - previous <= opts.rel_tol * std::max(std::abs(current), 1e-12))
            break;
    }

    // Back to the unwhitened coordinates.
    result.precoders.reserve(bins);
    for (std::size_t k = 0; k < bins; ++k)
        result.precoders.push_back(arma::solve(arma::trimatu(factor), precoders[k]));
    return result;
}

// ---------- Rate bookkeeping ----------

double rate_mu(const arma::cx_rowvec& channel_row, const arma::cx_mat& analog,
               const arma::cx_mat& digital, int user, double noise_power)
{
    if (user < 0 || user >= static_cast<int>(digital.n_cols))
        throw std::invalid_argument("rate_mu: user index out of range");
    if (!(noise_power > 0.0))
        throw std::invalid_argument("rate_mu: noise power must be positive");
    const arma::cx_rowvec received = channel_row * analog * digital;
    double interference = noise_power;
    for (arma::uword i = 0; i < received.n_elem; ++i)
        if (static_cast<int>(i) != user)
            interference += std::norm(received(i));
    return std::log1p(std::norm(received(static_cast<arma::uword>(user))) / interference) /
           std::numbers::ln2;
}

arma::vec user_rates(const MultiuserChannel& channel, const arma::cx_mat& analog,
                     const std::vector<arma::cx_mat>& precoders, double noise_power)
{
    if (precoders.size() != channel.stacked.size())
        throw std::invalid_argument("user_rates: one precoder per subcarrier required");
    const int users = channel.users();
    arma::vec rates(users, arma::fill::zeros);
    for (std::size_t k = 0; k < precoders.size(); ++k)
        for (int n = 0; n < users; ++n)
            rates(n) += rate_mu(channel.stacked[k].row(static_cast<arma::uword>(n)), analog,
                                precoders[k], n, noise_power);
    return rates / double(precoders.size());
}

double weighted_sum_rate(const MultiuserChannel& channel, const arma::cx_mat& analog,
                         const std::vector<arma::cx_mat>& precoders, const arma::vec& weights,
                         double noise_power)
{
    const arma::vec rates = user_rates(channel, analog, precoders, noise_power);
    if (weights.n_elem != rates.n_elem)
        throw std::invalid_argument("weighted_sum_rate: one weight per user required");
    return arma::dot(weights, rates);
}

// ---------- End-to-end designs ----------

MuPrecoder hybrid_mu_design(const MultiuserChannel& channel, int rf_chains, const arma::vec& weights,
                            double power, double noise_power, const MuDesignOptions& opts)
{
    if (channel.stacked.empty())
        throw std::invalid_argument("hybrid_mu_design: empty channel");
    const int antennas = static_cast<int>(channel.stacked.front().n_cols);
    if (rf_chains < 1 || rf_chains > antennas)
        throw std::invalid_argument("hybrid_mu_design: RF-chain count out of range");

    MuPrecoder designed;
    designed.weights = weights;

    const arma::cx_mat avg_cov = average_covariance(channel.stacked);
    const double gain_over_noise =
        power / (double(antennas) * double(rf_chains) * noise_power);
    const StructureMask mask = StructureMask::make(Structure::fully_connected, antennas, rf_chains);
    designed.analog =
        design_analog(avg_cov, mask, gain_over_noise, infinite_resolution, opts.analog).analog;

    std::vector<arma::cx_mat> effective;
    effective.reserve(channel.stacked.size());
    for (const arma::cx_mat& stacked : channel.stacked)
        effective.push_back(stacked * designed.analog);
    arma::cx_mat gram = designed.analog.t() * designed.analog;

    WmmseResult digital =
        wmmse_digital(effective, gram, weights, power, noise_power, opts.wmmse);
    designed.digital = std::move(digital.precoders);
    designed.objective_trace = std::move(digital.objective_trace);
    designed.multipliers = std::move(digital.multipliers);
    return designed;
}

MuPrecoder fully_digital_wmmse(const MultiuserChannel& channel, const arma::vec& weights,
                               double power, double noise_power, const WmmseOptions& opts)
{
    if (channel.stacked.empty())
        throw std::invalid_argument("fully_digital_wmmse: empty channel");
    const arma::uword antennas = channel.stacked.front().n_cols;

    MuPrecoder designed;
    designed.weights = weights;
    designed.analog.eye(antennas, antennas);

    WmmseResult digital = wmmse_digital(channel.stacked, designed.analog, weights, power,
                                        noise_power, opts);
    designed.digital = std::move(digital.precoders);
    designed.objective_trace = std::move(digital.objective_trace);
    designed.multipliers = std::move(digital.multipliers);
    return designed;
}

arma::vec adapt_weights(const arma::vec& average_rates)
{
    if (average_rates.n_elem == 0)
        throw std::invalid_argument("adapt_weights: empty rate history");
    if (average_rates.min() < 0.0)
        throw std::invalid_argument("adapt_weights: rates must be nonnegative");
    arma::vec weights = 1.0 / (1e-6 + average_rates);
    return weights * (double(average_rates.n_elem) / arma::accu(weights));
}

} // namespace beamkit

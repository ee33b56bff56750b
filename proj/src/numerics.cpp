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

#include "beamkit/numerics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace beamkit
{

namespace
{

void require_hermitian(const arma::cx_mat& m, const char* who)
{
    if (!m.is_square())
        throw std::invalid_argument(std::string(who) + ": matrix is not square");
    const double scale = arma::norm(m, "fro");
    const double asym = arma::norm(m - m.t(), "fro");
    if (asym > 1e-10 * std::max(scale, 1e-12))
        throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian (relative asymmetry " +
                                    std::to_string(asym / std::max(scale, 1e-12)) + ")");
}

} // namespace

void require_finite(const arma::cx_mat& m, const char* name)
{
    if (!m.is_finite())
        throw std::invalid_argument(std::string(name) + ": non-finite entries");
}

EigResult hermitian_eig(const arma::cx_mat& m)
{
    require_finite(m, "hermitian_eig");
    require_hermitian(m, "hermitian_eig");

    arma::vec ev;
    arma::cx_mat vectors;
    const arma::cx_mat sym = 0.5 * (m + m.t());
    if (!arma::eig_sym(ev, vectors, sym))
        throw std::runtime_error("hermitian_eig: eigendecomposition failed");

    // eig_sym returns ascending order
    EigResult out;
    out.eigenvalues = arma::reverse(ev);
    out.eigenvectors = arma::fliplr(vectors);
    return out;
}

SvdResult svd(const arma::cx_mat& m)
{
    require_finite(m, "svd");
    SvdResult out;
    if (!arma::svd_econ(out.left, out.singular_values, out.right, m))
        throw std::runtime_error("svd: decomposition failed");
    return out;
}

PowerAllocation water_filling(const arma::vec& gains, double budget)
{
    if (gains.n_elem == 0)
        throw std::invalid_argument("water_filling: empty gain list");
    if (!(budget > 0.0))
        throw std::invalid_argument("water_filling: budget must be positive");
    if (!gains.is_finite())
        throw std::invalid_argument("water_filling: non-finite gains");

    const arma::uvec positive = arma::find(gains > 0.0);
    if (positive.n_elem == 0)
        throw std::invalid_argument("water_filling: no positive gain");

    // Sort the positive gains descending; the KKT solution activates a prefix.
    arma::vec g = arma::sort(gains.elem(positive), "descend");
    const arma::uword n = g.n_elem;

    double level = 0.0;
    arma::uword active = n;
    double inv_sum = 0.0;
    for (arma::uword i = 0; i < n; ++i)
        inv_sum += 1.0 / g(i);
    for (; active >= 1; --active)
    {
        level = (budget + inv_sum) / double(active);
        if (level > 1.0 / g(active - 1))
            break; // every stream in the prefix gets positive power
        inv_sum -= 1.0 / g(active - 1);
    }
    if (active == 0)
        throw std::runtime_error("water_filling: no feasible active set");

    PowerAllocation out;
    out.water_level = level;
    out.powers.zeros(gains.n_elem);
    double used = 0.0;
    for (arma::uword i = 0; i < gains.n_elem; ++i)
    {
        if (gains(i) > 0.0)
        {
            out.powers(i) = std::max(0.0, level - 1.0 / gains(i));
            used += out.powers(i);
        }
    }

    // The analytic level should consume the budget exactly; fall back to a
    // bisection on the water level if rounding pushed it off.
    if (std::abs(used - budget) > 1e-10 * budget)
    {
        double lo = 0.0, hi = budget + 1.0 / g(n - 1);
        for (int iter = 0; iter < 200; ++iter)
        {
            const double mid = 0.5 * (lo + hi);
            double p = 0.0;
            for (arma::uword i = 0; i < n; ++i)
                p += std::max(0.0, mid - 1.0 / g(i));
            (p > budget ? hi : lo) = mid;
        }
        out.water_level = 0.5 * (lo + hi);
        for (arma::uword i = 0; i < gains.n_elem; ++i)
            out.powers(i) = gains(i) > 0.0 ? std::max(0.0, out.water_level - 1.0 / gains(i)) : 0.0;
    }
    return out;
}

double logdet_psd(const arma::cx_mat& m)
{
    require_finite(m, "logdet_psd");
    require_hermitian(m, "logdet_psd");

    const arma::cx_mat sym = 0.5 * (m + m.t());
    arma::cx_mat chol_factor;
    if (arma::chol(chol_factor, sym))
    {
        double acc = 0.0;
        for (arma::uword i = 0; i < chol_factor.n_rows; ++i)
            acc += std::log(chol_factor(i, i).real());
        return 2.0 * acc;
    }

    // Cholesky rejects semidefinite input; decide via the spectrum.
    arma::vec ev;
    if (!arma::eig_sym(ev, sym))
        throw std::runtime_error("logdet_psd: eigendecomposition failed");
    const double scale = ev.n_elem ? std::max(std::abs(ev.max()), std::abs(ev.min())) : 0.0;
    if (ev.n_elem && ev.min() < -1e-10 * std::max(scale, 1e-12))
        throw std::invalid_argument("logdet_psd: matrix is indefinite (min eigenvalue " +
                                    std::to_string(ev.min()) + ")");
    double acc = 0.0;
    for (arma::uword i = 0; i < ev.n_elem; ++i)
    {
        if (ev(i) <= 0.0)
            return -std::numeric_limits<double>::infinity();
        acc += std::log(ev(i));
    }
    return acc;
}

std::complex<double> quantize_phase(std::complex<double> z, int bits)
{
    if (bits < 0)
        throw std::invalid_argument("quantize_phase: negative resolution");
    if (bits == infinite_resolution)
    {
        const double mag = std::abs(z);
        return mag == 0.0 ? std::complex<double>(1.0, 0.0) : z / mag;
    }
    if (bits > 30)
        throw std::invalid_argument("quantize_phase: resolution too large");

    const int count = 1 << bits;
    const double step = 6.283185307179586 / double(count);
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < count; ++i)
    {
        const std::complex<double> g = std::polar(1.0, step * double(i));
        const double score = (std::conj(g) * z).real();
        if (score > best_score)
        {
            best_score = score;
            best = i;
        }
    }
    return std::polar(1.0, step * double(best));
}

} // namespace beamkit

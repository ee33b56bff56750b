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

#ifndef BEAMKIT_NUMERICS_HPP
#define BEAMKIT_NUMERICS_HPP

#include <armadillo>
#include <complex>

namespace beamkit
{

// Phase-shifter resolution: number of bits b, so the constellation is the
// 2^b-th roots of unity. 0 means infinite-resolution (continuous phase).
inline constexpr int infinite_resolution = 0;

struct EigResult
{
    arma::vec eigenvalues;    // sorted descending
    arma::cx_mat eigenvectors; // column i pairs with eigenvalues(i)
};

struct SvdResult
{
    arma::cx_mat left;       // m x r, orthonormal columns (r = min(m,n))
    arma::vec singular_values; // sorted descending
    arma::cx_mat right;      // n x r, orthonormal columns
};

struct PowerAllocation
{
    arma::vec powers;        // nonnegative, sum <= budget
    double water_level = 0.0; // powers(i) = max(0, water_level - 1/gains(i))
};

// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
// Rejects input whose relative asymmetry ||M - M^H|| / ||M|| exceeds 1e-10.
EigResult hermitian_eig(const arma::cx_mat& m);

// Thin SVD with singular values descending: m = left * diag(s) * right^H.
SvdResult svd(const arma::cx_mat& m);

// Optimal power allocation maximizing sum_i log2(1 + gains(i) * p(i))
// subject to sum_i p(i) <= budget. Gains must contain at least one positive
// entry; nonpositive gains receive zero power. The full budget is consumed.
PowerAllocation water_filling(const arma::vec& gains, double budget);

// Natural-log determinant of a Hermitian positive-semidefinite matrix,
// computed through a Cholesky factorization with an eigenvalue fallback.
// Returns -inf for a singular matrix; rejects indefinite input
// (eigenvalues below -1e-10 * ||M||).
double logdet_psd(const arma::cx_mat& m);

// Nearest constellation point to the phase of z. For bits == 0 the result is
// z/|z| (or 1 when z == 0); otherwise the element g of {1, w, ..., w^(2^b-1)},
// w = exp(j*2*pi/2^b), maximizing Re{conj(g) * z}, ties broken toward the
// smaller phase index.
std::complex<double> quantize_phase(std::complex<double> z, int bits);

// Throws if any entry of m is NaN or Inf.
void require_finite(const arma::cx_mat& m, const char* name);

} // namespace beamkit

#endif

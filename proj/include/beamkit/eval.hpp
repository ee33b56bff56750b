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
// Rate evaluation and Monte Carlo experiment execution: spectral-efficiency
// formulas, the fully-digital baseline, per-trial method evaluation, and the
// parallel sweep driver with its serial reference twin.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <armadillo>

#include "beamkit/channel.hpp"
#include "beamkit/scenario.hpp"
#include "beamkit/types.hpp"

namespace beamkit
{

// ---------- Spectral-efficiency formulas ----------

// Rate of one subcarrier through a linear receiver: the transmitted streams
// pass through channel_bin and are projected onto the columns of rx, which
// need not be orthonormal (the formula accounts for the resulting colored
// noise).  A rank-deficient combiner yields the rate of its column space —
// directions below 1e-12 of the leading singular value count as lost — and
// an all-zero combiner yields 0.  Bits/s/Hz.
double rate_su(const arma::cx_mat& channel_bin, const arma::cx_mat& tx, const arma::cx_mat& rx,
               double noise_power);

// Rate of one subcarrier with an ideal (fully-digital, optimal) receiver:
// log2 det(I + tx^H channel^H channel tx / noise_power).  Bits/s/Hz.
double rate_su_ideal(const arma::cx_mat& channel_bin, const arma::cx_mat& tx, double noise_power);

// Mean rate over all subcarriers of a designed link; uses the combiner when
// one is present and the ideal-receiver formula otherwise.
double mean_rate(const ChannelRealization& channel, const HybridBeamformer& beamformer,
                 double noise_power);

// ---------- Fully-digital baseline ----------

struct FullyDigitalResult
{
    double mean_rate = 0.0;               // bits/s/Hz averaged over subcarriers
    std::vector<arma::cx_mat> precoders;  // tx_antennas x streams per subcarrier
};

// Unconstrained per-subcarrier optimum: singular-value beams with
// water-filled power across the strongest `streams` modes.
FullyDigitalResult fully_digital_baseline(const ChannelRealization& channel, int streams,
                                          double tx_power, double noise_power);

// ---------- Unit conversions ----------

// 10^((dbm - 30) / 10), i.e. dBm to watts.
double dbm_to_watt(double dbm);

// Power spectral density integrated over one subcarrier, still in dBm:
// psd_dbm_hz + 10*log10(bandwidth_mhz * 1e6 / subcarriers).
double per_subcarrier_dbm(double psd_dbm_hz, double bandwidth_mhz, int subcarriers);

// ---------- Monte Carlo sweeps ----------

struct CellStats
{
    double mean = 0.0;      // over successful trials; NaN when none succeeded
    double std_error = 0.0; // sample standard error; NaN below two successes
    int successes = 0;
    int failed = 0;
};

struct SweepResult
{
    std::vector<double> axis;                  // SNR in dB, array size, or PSD in dBm/Hz
    std::vector<std::string> methods;          // scenario order
    std::vector<std::vector<CellStats>> cells; // [axis][method]

    // Per-trial values ([axis][method][trial], NaN for failures), retained
    // when MonteCarloOptions::keep_trials is set.  Trials are paired: one
    // channel realization per (axis, trial) is shared by every method.
    std::vector<std::vector<std::vector<double>>> trial_values;
};

struct MonteCarloOptions
{
    bool run_parallel = true; // OpenMP over trials
    bool keep_trials = false; // retain the per-trial value tensor
};

// Runs the scenario's sweep (every mode except mu_cdf).  Trial t always uses
// seed scenario.seed + t, and results are reduced in trial order, so the
// output is identical for any thread count.
SweepResult monte_carlo(const Scenario& scenario, const MonteCarloOptions& opts = {});

// Plain serial loop over the same per-trial evaluation; the reference the
// parallel driver is tested and benchmarked against.
SweepResult monte_carlo_serial(const Scenario& scenario, const MonteCarloOptions& opts = {});

// ---------- Multiuser rate CDF ----------

struct CdfResult
{
    std::vector<std::string> methods;       // scenario order
    std::vector<std::vector<double>> rates; // per-user average served rate, sorted ascending
};

// Sequential scheduling protocol behind the rate-CDF mode: a fixed user
// population, per-slot random subsets, shared fading across methods, and
// per-method weight feedback.  Inherently serial.
CdfResult run_mu_cdf(const Scenario& scenario);

struct CdfCurve
{
    std::vector<double> value;       // sorted ascending
    std::vector<double> probability; // (i + 1) / n
};

// Empirical CDF of the finite entries of `values`.
CdfCurve rate_cdf(std::vector<double> values);

} // namespace beamkit

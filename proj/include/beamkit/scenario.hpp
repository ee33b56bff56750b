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
// Experiment descriptions: the INI-style config grammar, named presets, and
// the strongly-typed Scenario struct every run is driven by.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beamkit/types.hpp"

namespace beamkit
{

// ---------- Enumerations ----------

// What a run sweeps and reports.
enum class Mode
{
    su_sweep_snr,      // single-user link, mean rate vs operating SNR
    su_sweep_antennas, // single-user link, mean rate vs symmetric array size
    mu_sum_rate,       // multiuser downlink, mean sum rate vs transmit PSD
    mu_cdf,            // multiuser downlink, per-user rate CDF at one PSD
};

// How multiuser rate weights are chosen.
enum class WeightProtocol
{
    equal,            // all users weighted equally
    inverse_expected, // static weights inverse to an expected-rate estimate
    adaptive,         // weights track served rates across scheduling slots
};

// ---------- Scenario ----------

// A complete, validated experiment description.  Scenarios come from config
// text (parse_config) or from a named preset; emit_config round-trips one
// back to text that parses to an equal Scenario.
struct Scenario
{
    int format_version = 1;

    // Transceiver shape.  tx_power / noise_power are filled per axis point at
    // run time; in antenna-sweep mode the array sizes come from the axis.
    ArchitectureSpec arch{.tx_antennas = 64,
                          .rx_antennas = 16,
                          .rf_chains = 4,
                          .streams = 2,
                          .subcarriers = 64,
                          .structure = Structure::fully_connected,
                          .phase_bits = infinite_resolution};

    // Channel statistics.
    int clusters = 5;
    int rays_per_cluster = 10;
    double angular_spread_deg = 10.0;
    // Cluster delays are uniform on [0, delay_fraction * subcarriers] in
    // units of the sampling period.
    double delay_fraction = 0.25;

    // Experiment axis and bookkeeping.
    Mode mode = Mode::su_sweep_snr;
    std::vector<double> snr_db = {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
    std::vector<int> antennas = {16, 32, 64, 128, 256};
    int trials = 100;
    std::uint64_t seed = 1;
    std::vector<std::string> methods = {"fully_digital", "hybrid"};
    bool equal_power = false; // closed-form digital stage instead of water-filling

    // Multiuser downlink knobs (mu_* modes only).
    int users = 4;
    int env_clusters = 10;
    double radius_km = 0.2;
    double min_distance_km = 0.01;
    double bandwidth_mhz = 32.0;
    std::vector<double> tx_psd_dbm_hz = {-65.0, -60.0, -55.0, -50.0, -45.0};
    double noise_psd_dbm_hz = -139.0;
    WeightProtocol weight_protocol = WeightProtocol::equal;
    double reference_psd_dbm_hz = -55.0; // PSD used for the static weight estimate
    int weight_redraws = 10;             // fading redraws behind that estimate
    int population = 40;                 // user pool size for mu_cdf scheduling

    bool operator==(const Scenario&) const = default;

    // Throws std::invalid_argument describing the first violated invariant.
    void validate() const;
};

// ---------- Method strings ----------

// A parsed method token, e.g. "hybrid_partial_tx_b1" or "hybrid_rf16".
struct MethodSpec
{
    std::string name;                                  // original token
    enum class Base { fully_digital, hybrid, asymptotic } base = Base::hybrid;
    Structure structure = Structure::fully_connected;  // "_partial"
    bool tx_only = false;                              // "_tx": ideal receiver
    int phase_bits = -1;                               // "_b<int>"; -1 inherits the architecture value
    int mu_rf_chains = 0;                              // "_rf<int>", multiuser hybrid
    int mu_antenna_limit = 0;                          // "_nt<int>", antenna truncation

    bool operator==(const MethodSpec&) const = default;
};

// Parses one method token; throws std::invalid_argument on unknown tokens or
// combinations that contradict the mode (e.g. "_rf" outside multiuser runs).
MethodSpec parse_method(const std::string& token, Mode mode);

// The effective single-user architecture a method runs under: applies the
// method's connectivity/quantization overrides and, when positive,
// antenna_override as the symmetric array size from an antenna sweep.
ArchitectureSpec arch_for_method(const Scenario& scenario, const MethodSpec& method,
                                 int antenna_override = 0);

// ---------- Config text ----------

// Parses INI-style config text ('#' comments, [sections], key = value).
// Unknown sections or keys, duplicate keys, malformed values, and a missing
// or unsupported format_version are all rejected with the offending line
// number in the exception message.  When `defaulted` is non-null it receives
// one "section.key = value" entry per key that fell back to its default.
Scenario parse_config(const std::string& text, std::vector<std::string>* defaulted = nullptr);

// Renders a Scenario as config text; parse_config(emit_config(s)) == s.
std::string emit_config(const Scenario& scenario);

// Returns the config text of a named preset; throws std::invalid_argument
// for unknown names.  preset_names() lists them.
std::string preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Convenience: parse_config(preset_config(name)).
Scenario preset(const std::string& name);

} // namespace beamkit

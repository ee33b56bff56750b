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
// Top-level experiment execution: runs a scenario and renders the versioned
// CSV report the CLI writes out.

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "beamkit/eval.hpp"
#include "beamkit/scenario.hpp"

namespace beamkit
{

// Runs the scenario end to end and renders its CSV report.  Rows are
// axis-major with methods in lexicographic order; rerunning the same
// scenario yields byte-identical text regardless of the thread count.
std::string run_scenario_csv(const Scenario& scenario, bool run_parallel = true);

// CSV for already-computed results (also used by tests).
// Sweep columns: axis,method,mean_rate,std_error,trials,failed.
std::string sweep_csv(const SweepResult& result);
// CDF columns: rate,cdf,method.
std::string cdf_csv(const CdfResult& result);

// Seed precedence: an explicit command-line seed wins, then the BEAMKIT_SEED
// environment variable (pass nullptr when unset), then the config value.
// Throws std::invalid_argument on a malformed environment value.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& cli_seed, const char* env_value,
                           std::uint64_t config_seed);

} // namespace beamkit

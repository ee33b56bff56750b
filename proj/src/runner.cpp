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
// Scenario execution and CSV rendering.

#include "beamkit/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace beamkit
{

namespace
{

constexpr const char* kHeaderLine = "# format_version=1\n";

std::string fmt(double value)
{
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.10g", value);
    return buffer;
}

// Indices of the methods in lexicographic name order; the report order is
// fixed by the names, not by the scenario's listing order.
std::vector<std::size_t> sorted_method_order(const std::vector<std::string>& methods)
{
    std::vector<std::size_t> order(methods.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return methods[a] < methods[b]; });
    return order;
}

} // namespace

std::string sweep_csv(const SweepResult& result)
{
    std::string out = kHeaderLine;
    out += "axis,method,mean_rate,std_error,trials,failed\n";
    const auto order = sorted_method_order(result.methods);
    for (std::size_t a = 0; a < result.axis.size(); ++a)
        for (const std::size_t m : order)
        {
            const CellStats& cell = result.cells[a][m];
            out += fmt(result.axis[a]) + "," + result.methods[m] + "," + fmt(cell.mean) + "," +
                   fmt(cell.std_error) + "," + std::to_string(cell.successes) + "," +
                   std::to_string(cell.failed) + "\n";
        }
    return out;
}

std::string cdf_csv(const CdfResult& result)
{
    std::string out = kHeaderLine;
    out += "rate,cdf,method\n";
    const auto order = sorted_method_order(result.methods);
    for (const std::size_t m : order)
    {
        const CdfCurve curve = rate_cdf(result.rates[m]);
        for (std::size_t i = 0; i < curve.value.size(); ++i)
            out += fmt(curve.value[i]) + "," + fmt(curve.probability[i]) + "," +
                   result.methods[m] + "\n";
    }
    return out;
}

std::string run_scenario_csv(const Scenario& scenario, bool run_parallel)
{
    scenario.validate();
    if (scenario.mode == Mode::mu_cdf)
        return cdf_csv(run_mu_cdf(scenario));
    MonteCarloOptions opts;
    opts.run_parallel = run_parallel;
    return sweep_csv(monte_carlo(scenario, opts));
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& cli_seed, const char* env_value,
                           std::uint64_t config_seed)
{
    if (cli_seed.has_value())
        return *cli_seed;
    if (env_value != nullptr)
    {
        const std::string text(env_value);
        std::uint64_t parsed = 0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), parsed);
        if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
            throw std::invalid_argument(
                "BEAMKIT_SEED must be a non-negative integer, got '" + text + "'");
        return parsed;
    }
    return config_seed;
}

} // namespace beamkit

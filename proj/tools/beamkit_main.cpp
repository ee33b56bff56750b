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
// Command-line front end: load a config or preset, apply overrides, run the
// experiment, and write the CSV report.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <omp.h>

#include "CLI11.hpp"

#include "beamkit/runner.hpp"
#include "beamkit/scenario.hpp"

namespace
{

std::string read_file(const std::string& path)
{
    std::ifstream stream(path, std::ios::binary);
    if (!stream)
        throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return buffer.str();
}

void write_output(const std::string& path, const std::string& text)
{
    if (path == "-")
    {
        std::cout << text;
        return;
    }
    std::ofstream stream(path, std::ios::binary);
    if (!stream)
        throw std::runtime_error("cannot open output file '" + path + "'");
    stream << text;
    if (!stream)
        throw std::runtime_error("failed writing output file '" + path + "'");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"beamkit — hybrid analog/digital beamforming designs over wideband channels"};

    std::string config_path;
    std::string preset_name;
    std::string out_path = "-";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    int threads = 0;
    bool serial = false;
    bool list_presets = false;
    bool print_config = false;

    auto* config_opt =
        app.add_option("--config", config_path, "Experiment config file (INI-style)");
    auto* preset_opt = app.add_option("--preset", preset_name, "Named built-in scenario");
    config_opt->excludes(preset_opt);
    preset_opt->excludes(config_opt);
    app.add_option("--out", out_path, "Output CSV path ('-' writes to stdout)");
    app.add_option("--seed", seed,
                   "Override the experiment seed (beats the BEAMKIT_SEED environment variable)");
    app.add_option("--trials", trials, "Override the Monte Carlo trial count");
    app.add_option("--threads", threads, "OpenMP thread count (0 keeps the runtime default)");
    app.add_flag("--serial", serial, "Use the serial reference driver instead of OpenMP");
    app.add_flag("--list-presets", list_presets, "List the built-in scenarios and exit");
    app.add_flag("--print-config", print_config,
                 "Print the fully-resolved config (after overrides) and exit");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (list_presets)
        {
            for (const auto& name : beamkit::preset_names())
                std::cout << name << "\n";
            return 0;
        }

        std::string text;
        if (!config_path.empty())
            text = read_file(config_path);
        else if (!preset_name.empty())
            text = beamkit::preset_config(preset_name);
        else
            throw std::runtime_error("one of --config or --preset is required "
                                     "(see --list-presets)");

        std::vector<std::string> defaulted;
        beamkit::Scenario scenario = beamkit::parse_config(text, &defaulted);
        for (const auto& entry : defaulted)
            std::cerr << "note: default " << entry << "\n";

        scenario.seed =
            beamkit::resolve_seed(seed, std::getenv("BEAMKIT_SEED"), scenario.seed);
        if (trials.has_value())
            scenario.trials = *trials;
        scenario.validate();

        if (threads > 0)
            omp_set_num_threads(threads);

        if (print_config)
        {
            std::cout << beamkit::emit_config(scenario);
            return 0;
        }

        write_output(out_path, beamkit::run_scenario_csv(scenario, !serial));
        return 0;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

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
// Benchmark: the OpenMP Monte Carlo driver against its serial reference on
// the same scenario, checking that both produce bit-identical statistics.
//
// Usage: beamkit_bench [trials] [threads]

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include <omp.h>

#include "beamkit/eval.hpp"
#include "beamkit/scenario.hpp"

namespace
{

beamkit::Scenario bench_scenario(int trials)
{
    beamkit::Scenario scenario;
    scenario.arch.tx_antennas = 32;
    scenario.arch.rx_antennas = 8;
    scenario.arch.rf_chains = 4;
    scenario.arch.streams = 2;
    scenario.arch.subcarriers = 16;
    scenario.mode = beamkit::Mode::su_sweep_snr;
    scenario.snr_db = {0.0, 10.0};
    scenario.trials = trials;
    scenario.seed = 7;
    scenario.methods = {"fully_digital", "hybrid"};
    return scenario;
}

bool identical(const beamkit::SweepResult& a, const beamkit::SweepResult& b)
{
    if (a.axis != b.axis || a.methods != b.methods || a.cells.size() != b.cells.size())
        return false;
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        for (std::size_t j = 0; j < a.cells[i].size(); ++j)
        {
            const auto& x = a.cells[i][j];
            const auto& y = b.cells[i][j];
            // Bitwise comparison: the parallel driver must reproduce the
            // serial reference exactly, NaNs included.
            if (std::memcmp(&x.mean, &y.mean, sizeof x.mean) != 0 ||
                std::memcmp(&x.std_error, &y.std_error, sizeof x.std_error) != 0 ||
                x.successes != y.successes || x.failed != y.failed)
                return false;
        }
    return true;
}

} // namespace

int main(int argc, char** argv)
{
    int trials = 24;
    int threads = 0;
    if (argc > 1)
        trials = std::atoi(argv[1]);
    if (argc > 2)
        threads = std::atoi(argv[2]);
    if (trials < 1 || (argc > 2 && threads < 1) || argc > 3)
    {
        std::fprintf(stderr, "usage: beamkit_bench [trials >= 1] [threads >= 1]\n");
        return 2;
    }
    if (threads > 0)
        omp_set_num_threads(threads);

    const beamkit::Scenario scenario = bench_scenario(trials);

    const double t0 = omp_get_wtime();
    const beamkit::SweepResult serial = beamkit::monte_carlo_serial(scenario);
    const double t1 = omp_get_wtime();
    const beamkit::SweepResult parallel = beamkit::monte_carlo(scenario);
    const double t2 = omp_get_wtime();

    const double serial_s = t1 - t0;
    const double parallel_s = t2 - t1;
    std::printf("trials            : %d\n", trials);
    std::printf("max threads       : %d\n", omp_get_max_threads());
    std::printf("serial reference  : %.3f s\n", serial_s);
    std::printf("openmp driver     : %.3f s\n", parallel_s);
    std::printf("speedup           : %.2fx\n", parallel_s > 0.0 ? serial_s / parallel_s : 0.0);

    if (!identical(serial, parallel))
    {
        std::printf("RESULT MISMATCH between serial and parallel drivers\n");
        return 1;
    }
    std::printf("results identical : yes\n");
    return 0;
}

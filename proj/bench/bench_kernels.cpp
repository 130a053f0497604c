/*
   Copyright 2026 The Anytime SMC Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// Serial reference path against the OpenMP kernels. Both produce identical
// numbers; only wall time differs.

#include <benchmark/benchmark.h>

#include "anytime/gamma_study.hpp"
#include "anytime/models/lgssm.hpp"
#include "anytime/models/lorenz96.hpp"
#include "anytime/smc.hpp"

using namespace anytime;

namespace {

Execution exec_of(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "parallel" : "serial"); }

void BM_AnytimeValidation(benchmark::State& state)
{
    gamma_study::Config c;
    c.replicates = 4096;
    c.horizon = 50;
    c.degrees = {2};
    c.exec = exec_of(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(gamma_study::run_anytime_validation(c));
    label(state);
}
BENCHMARK(BM_AnytimeValidation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

lgssm::Spec lgssm_data()
{
    lgssm::Spec s;
    Stream rng = Stream::derive(1, "bench-data");
    s.y = lgssm::simulate(s, 0.8, 25, rng);
    return s;
}

void BM_PseudomarginalMoves(benchmark::State& state)
{
    const auto spec = lgssm_data();
    const auto targets = lgssm::pseudomarginal_targets(spec, 64);
    auto sys = initialize(targets, 256, 1, Execution::serial);
    for (int v = 1; v <= 10; ++v)
        weight_step(sys, targets, 1, Execution::serial);
    const auto kernel = targets.make_move(sys.particles, 10);
    for (auto _ : state) {
        auto particles = sys.particles;
        benchmark::DoNotOptimize(move_fixed(particles, kernel, 2, 1, 10, exec_of(state)));
    }
    label(state);
}
BENCHMARK(BM_PseudomarginalMoves)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LorenzSmc2(benchmark::State& state)
{
    lorenz96::Spec spec;
    spec.sigma2 = 1.0;
    spec.obs_var = 1.0;
    Stream rng = Stream::derive(1, "bench-lorenz");
    spec.data = lorenz96::simulate_dataset(spec, 4.8801, 2.0, rng);
    const auto targets = lorenz96::smc2_targets(spec, 32);
    SmcConfig cfg;
    cfg.particles = 16;
    cfg.move.moves = 1;
    cfg.exec = exec_of(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(run_smc(targets, cfg));
    label(state);
}
BENCHMARK(BM_LorenzSmc2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

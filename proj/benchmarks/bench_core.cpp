// Copyright 2026 The fbtur Authors
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

#include <benchmark/benchmark.h>

#include "fbtur/dynamics.hpp"
#include "fbtur/linalg.hpp"
#include "fbtur/models.hpp"
#include "fbtur/superop.hpp"
#include "fbtur/thermo.hpp"
#include "fbtur/trajectories.hpp"

namespace {

using namespace fbtur;

void BM_HermEig(benchmark::State& state) {
  const auto dim = static_cast<Eigen::Index>(state.range(0));
  const CMatrix a = models::random_model(static_cast<int>(dim), 1, 3, models::RandomFeedback::unitary).initial_state;
  for (auto _ : state) benchmark::DoNotOptimize(linalg::herm_eig(a));
}
BENCHMARK(BM_HermEig)->Arg(2)->Arg(3)->Arg(8)->Arg(16);

void BM_SigmaRate(benchmark::State& state) {
  const ModelSpec spec = models::build_clock({});
  const CMatrix rho = steady_state(spec);
  for (auto _ : state) benchmark::DoNotOptimize(thermo::sigma_rate(spec, rho));
}
BENCHMARK(BM_SigmaRate);

void BM_BuildGenerators(benchmark::State& state) {
  const ModelSpec spec = models::random_model(static_cast<int>(state.range(0)), 3, 1, models::RandomFeedback::mixed);
  for (auto _ : state) benchmark::DoNotOptimize(superop::build_generators(spec));
}
BENCHMARK(BM_BuildGenerators)->Arg(3)->Arg(6);

void BM_PropagateClock(benchmark::State& state) {
  const ModelSpec spec = models::build_clock({});
  IntegratorConfig cfg;
  cfg.h = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(propagate(spec, 1.0, cfg));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_PropagateClock)->Unit(benchmark::kMillisecond);

void BM_TrajectoryThroughput(benchmark::State& state) {
  const ModelSpec spec = models::build_clock({});
  TrajectoryOptions opts;
  opts.record_events = false;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_trajectory(spec, 1.0, 1e-4, seed++, opts));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TrajectoryThroughput)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

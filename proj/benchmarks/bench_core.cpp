//------------------------------------------------------------------------------
//
//   Copyright 2026 The popsim Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <benchmark/benchmark.h>

#include "popsim/analysis.hpp"
#include "popsim/attacks.hpp"
#include "popsim/crp.hpp"
#include "popsim/metrics.hpp"
#include "popsim/pop.hpp"

using namespace popsim;

namespace {

void BM_ApufResponse(benchmark::State &state)
{
  auto const inst = new_instance(static_cast<unsigned>(state.range(0)), 1.0, 1);
  SplitMix64 rng(2);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(inst.response(Challenge::random(inst.n_stages(), rng)));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ApufResponse)->Arg(8)->Arg(64);

void BM_PopResponse(benchmark::State &state)
{
  PopConfig cfg;
  cfg.first_layer_stages = static_cast<unsigned>(state.range(0));
  cfg.rounds             = static_cast<unsigned>(state.range(1));
  cfg.master_seed        = 3;
  auto const pop         = PopInstance::build(cfg);
  SplitMix64 rng(4);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(pop.response(Challenge::random(cfg.width, rng)));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PopResponse)->Args({8, 1})->Args({24, 1})->Args({2, 8});

void BM_NoisyPopTmv(benchmark::State &state)
{
  PopConfig cfg;
  cfg.tmv.votes   = static_cast<unsigned>(state.range(0));
  cfg.master_seed = 5;
  auto const       pop = PopInstance::build(cfg);
  NoiseModel const noise{0.1, 6};
  NoiseSource      draw = noise.make_source();
  SplitMix64       rng(7);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(evaluate_pop(pop, Challenge::random(cfg.width, rng), noise, draw));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NoisyPopTmv)->Arg(1)->Arg(15);

void BM_GenerateCrps(benchmark::State &state)
{
  PopConfig cfg;
  cfg.master_seed = 8;
  auto const pop  = PopInstance::build(cfg);
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(generate_crps(pop, 10000, 9, NoiseModel{}));
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_GenerateCrps)->Unit(benchmark::kMillisecond);

void BM_SacCurve(benchmark::State &state)
{
  SacConfig c;
  c.n_instances  = 4;
  c.n_challenges = 1000;
  c.seed         = 10;
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(sac_curve(c));
  }
}
BENCHMARK(BM_SacCurve)->Unit(benchmark::kMillisecond);

void BM_AuthFailure(benchmark::State &state)
{
  AuthPolicy const policy{200, 0.1, 0.05};
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(auth_failure_prob(policy, 0.1, 100000, 11));
  }
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_AuthFailure)->Unit(benchmark::kMillisecond);

void BM_MlpEpoch(benchmark::State &state)
{
  PopConfig cfg;
  cfg.first_layer_stages = 2;
  cfg.master_seed        = 12;
  auto const  set        = generate_crps(PopInstance::build(cfg), 20000, 13, NoiseModel{});
  TrainConfig tc         = TrainConfig::for_mlp();
  tc.epochs              = 1;
  tc.seed                = 14;
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(train_mlp(set, tc));
  }
  state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_MlpEpoch)->Unit(benchmark::kMillisecond);

void BM_LrTrain(benchmark::State &state)
{
  auto const set = generate_crps(new_instance(64, 1.0, 15), 20000, 16, NoiseModel{});
  TrainConfig tc = TrainConfig::for_lr();
  tc.seed        = 17;
  for (auto _ : state)
  {
    benchmark::DoNotOptimize(train_lr(set, tc));
  }
}
BENCHMARK(BM_LrTrain)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

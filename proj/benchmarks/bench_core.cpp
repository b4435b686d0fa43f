// Copyright 2026 The pnorm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "pnorm/critical_values.hpp"
#include "pnorm/norms.hpp"
#include "pnorm/rng.hpp"

using namespace pnorm;

static void BM_Ziggurat(benchmark::State& state) {
  Xoshiro256pp rng(42);
  for (auto _ : state) benchmark::DoNotOptimize(standard_normal(rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Ziggurat);

static std::vector<double> noise(std::int64_t d) {
  Xoshiro256pp rng(7);
  std::vector<double> y(static_cast<std::size_t>(d));
  for (auto& v : y) v = standard_normal(rng);
  return y;
}

// Integer exponents plus sup.
static void BM_NormBankInteger(benchmark::State& state) {
  const auto y = noise(state.range(0));
  NormBank bank({Exponent::finite(1), Exponent::finite(2), Exponent::finite(3), Exponent::finite(4), Exponent::sup()});
  NormBank::Workspace ws;
  std::vector<double> out(bank.size());
  for (auto _ : state) {
    bank.evaluate(y, out, ws);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NormBankInteger)->Arg(1000)->Arg(10000)->Arg(100000);

// Non-integer ladder exponents take the exp/log path.
static void BM_NormBankLadder(benchmark::State& state) {
  const auto y = noise(state.range(0));
  NormBank bank({Exponent::finite(2), Exponent::finite(3.718281828459045), Exponent::finite(8.38905609893065),
                 Exponent::finite(21.085536923187668), Exponent::finite(55.598150033144236)});
  NormBank::Workspace ws;
  std::vector<double> out(bank.size());
  for (auto _ : state) {
    bank.evaluate(y, out, ws);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NormBankLadder)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_SimulateNull(benchmark::State& state) {
  MonteCarloPlan plan;
  plan.replications = 1000;
  plan.seed = 3;
  plan.workers = 1;
  for (auto _ : state) {
    auto null = simulate_null({Exponent::finite(2), Exponent::sup()}, state.range(0), plan);
    benchmark::DoNotOptimize(null);
  }
  state.SetItemsProcessed(state.iterations() * plan.replications * state.range(0));
}
BENCHMARK(BM_SimulateNull)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

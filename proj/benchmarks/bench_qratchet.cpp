// Copyright 2026 The qratchet Authors
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

#include "qratchet/classical.hpp"
#include "qratchet/floquet.hpp"
#include "qratchet/observables.hpp"

namespace {

using namespace qratchet;

RatchetSystem fig1(int n_cut) {
  RatchetSystem s;
  s.driving = {2, 2, 2, -kPi / 2, 0};
  s.hbar = 0.2;
  s.n_cut = n_cut;
  return s;
}

PropagatorConfig config(Scheme scheme) {
  PropagatorConfig c;
  c.scheme = scheme;
  return c;
}

void BM_FloquetKickSplit(benchmark::State& state) {
  const RatchetSystem sys = fig1(static_cast<int>(state.range(0)));
  const PropagatorConfig cfg = config(Scheme::kKickSplit);
  for (auto _ : state) benchmark::DoNotOptimize(build_floquet_matrix(sys, cfg).u.data());
}
BENCHMARK(BM_FloquetKickSplit)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FloquetInteractionPicture(benchmark::State& state) {
  const RatchetSystem sys = fig1(static_cast<int>(state.range(0)));
  const PropagatorConfig cfg = config(Scheme::kInteractionPicture);
  for (auto _ : state) benchmark::DoNotOptimize(build_floquet_matrix(sys, cfg).u.data());
}
BENCHMARK(BM_FloquetInteractionPicture)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const FloquetMatrix fm = build_floquet_matrix(fig1(64), config(Scheme::kInteractionPicture), 0.0,
                                                kDefaultSamples);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(fm).quasienergies.data());
}
BENCHMARK(BM_Decompose)->Unit(benchmark::kMillisecond);

void BM_AveragedCurrent(benchmark::State& state) {
  const RatchetSystem sys = fig1(64);
  const PropagatorConfig cfg = config(Scheme::kInteractionPicture);
  for (auto _ : state)
    benchmark::DoNotOptimize(averaged_current(sys, cfg, InitialState::plane_wave_zero(), 16).mean);
}
BENCHMARK(BM_AveragedCurrent)->Unit(benchmark::kMillisecond);

void BM_ClassicalEnsemble(benchmark::State& state) {
  ChaoticCurrentConfig cfg;
  cfg.n_particles = 128;
  cfg.n_periods = 500;
  for (auto _ : state) benchmark::DoNotOptimize(chaotic_current(fig1(64), cfg).j);
}
BENCHMARK(BM_ClassicalEnsemble)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

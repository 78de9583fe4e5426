// Copyright 2026 The Footfall Authors. All Rights Reserved.
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

// Serial reference vs OpenMP variant for each kernel. Thread count follows
// OMP_NUM_THREADS.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "footfall/features.hpp"
#include "footfall/kernels.hpp"

namespace {

using footfall::MultiChannelClip;
using footfall::Spectrogram;
using footfall::kernels::Exec;

MultiChannelClip noise_clip(std::uint64_t seed) {
  MultiChannelClip clip(footfall::kNumMics, footfall::kSampleRate);
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, 0.02f);
  for (int c = 0; c < clip.n_channels(); ++c) {
    for (auto& v : clip.channel(c)) v = g(rng);
  }
  return clip;
}

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::kSerial : Exec::kParallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_ClipSpectrograms(benchmark::State& state) {
  const auto clip = noise_clip(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(footfall::kernels::clip_spectrograms(clip, exec_of(state)));
  }
  label(state);
}
BENCHMARK(BM_ClipSpectrograms)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MeanSpectrograms(benchmark::State& state) {
  std::vector<MultiChannelClip> clips;
  for (int k = 0; k < 10; ++k) clips.push_back(noise_clip(10 + k));
  for (auto _ : state) {
    benchmark::DoNotOptimize(footfall::kernels::mean_spectrograms(clips, exec_of(state)));
  }
  label(state);
}
BENCHMARK(BM_MeanSpectrograms)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PoolEnergy(benchmark::State& state) {
  const auto specs = footfall::kernels::clip_spectrograms(noise_clip(2), Exec::kSerial);
  const auto empty = footfall::kernels::clip_spectrograms(noise_clip(3), Exec::kSerial);
  std::vector<double> energy(footfall::kEnergyFeatures), grad(energy.size());
  for (auto _ : state) {
    footfall::kernels::pool_energy(specs, empty, 0.5, energy, grad, exec_of(state));
    benchmark::ClobberMemory();
  }
  label(state);
}
BENCHMARK(BM_PoolEnergy)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_PoolEnergyKnots(benchmark::State& state) {
  const auto specs = footfall::kernels::clip_spectrograms(noise_clip(4), Exec::kSerial);
  const auto empty = footfall::kernels::clip_spectrograms(noise_clip(5), Exec::kSerial);
  constexpr int knots = 11;
  std::vector<float> out(static_cast<std::size_t>(footfall::kEnergyFeatures) * knots);
  for (auto _ : state) {
    footfall::kernels::pool_energy_knots(specs, empty, knots, out, exec_of(state));
    benchmark::ClobberMemory();
  }
  label(state);
}
BENCHMARK(BM_PoolEnergyKnots)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GccBlock(benchmark::State& state) {
  const auto clip = noise_clip(6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(footfall::kernels::gcc_block(clip, exec_of(state)));
  }
  label(state);
}
BENCHMARK(BM_GccBlock)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

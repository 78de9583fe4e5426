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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "footfall/features.hpp"
#include "footfall/kernels.hpp"
#include "test_util.hpp"

using namespace footfall;
using footfall::kernels::Exec;

namespace {

MultiChannelClip shifted_clip(int lag, std::uint64_t seed) {
  // Channel c is the same noise delayed by c * lag samples.
  const auto s = footfall::testing::white_noise(kSampleRate + 400, seed, 0.02);
  MultiChannelClip clip(4, kSampleRate);
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i < kSampleRate; ++i) {
      clip.channel(c)[i] = s[200 + i - c * lag];
    }
  }
  return clip;
}

std::vector<Spectrogram> random_specs(std::uint64_t seed, float lo, float hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(lo, hi);
  std::vector<Spectrogram> out(4);
  for (auto& s : out) {
    for (auto& v : s.values()) v = u(rng);
  }
  return out;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("serial and parallel spectrograms agree exactly") {
  const auto clip = normalize_rms(footfall::testing::noise_clip(4, kSampleRate, 1));
  CHECK(kernels::clip_spectrograms(clip, Exec::kSerial) ==
        kernels::clip_spectrograms(clip, Exec::kParallel));
}

TEST_CASE("serial and parallel means agree exactly") {
  std::vector<MultiChannelClip> clips;
  for (int k = 0; k < 3; ++k) {
    clips.push_back(normalize_rms(footfall::testing::noise_clip(4, kSampleRate, 10 + k)));
  }
  const auto a = kernels::mean_spectrograms(clips, Exec::kSerial);
  const auto b = kernels::mean_spectrograms(clips, Exec::kParallel);
  CHECK(a == b);
}

TEST_CASE("serial and parallel gcc blocks agree exactly") {
  const auto clip = normalize_rms(shifted_clip(3, 2));
  CHECK(kernels::gcc_block(clip, Exec::kSerial) ==
        kernels::gcc_block(clip, Exec::kParallel));
}

TEST_CASE("serial and parallel pooling agree") {
  const auto in = random_specs(3, -0.2f, 1.2f);
  const auto empty = random_specs(4, 0.0f, 1.0f);
  std::vector<double> e1(kEnergyFeatures), g1(kEnergyFeatures);
  std::vector<double> e2(kEnergyFeatures), g2(kEnergyFeatures);
  for (double w : {0.0, 0.35, 1.0}) {
    kernels::pool_energy(in, empty, w, e1, g1, Exec::kSerial);
    kernels::pool_energy(in, empty, w, e2, g2, Exec::kParallel);
    for (int i = 0; i < kEnergyFeatures; ++i) {
      REQUIRE(e2[i] == doctest::Approx(e1[i]).epsilon(1e-12));
      REQUIRE(g2[i] == doctest::Approx(g1[i]).epsilon(1e-12));
    }
  }
  std::vector<float> k1(kEnergyFeatures * 5), k2(kEnergyFeatures * 5);
  kernels::pool_energy_knots(in, empty, 5, k1, Exec::kSerial);
  kernels::pool_energy_knots(in, empty, 5, k2, Exec::kParallel);
  for (std::size_t i = 0; i < k1.size(); ++i) {
    REQUIRE(k2[i] == doctest::Approx(k1[i]).epsilon(1e-6));
  }
}

}  // TEST_SUITE

TEST_SUITE("features") {

TEST_CASE("pool grid covers every cell once") {
  const auto& g = PoolGrid::get();
  CHECK(g.band_edges.front() == 0);
  CHECK(g.band_edges.back() == kFreqBins);
  CHECK(g.segment_edges.front() == 0);
  CHECK(g.segment_edges.back() == kFrames);
  int total = 0;
  for (int b = 0; b < kEnergyBands; ++b) {
    for (int s = 0; s < kEnergySegments; ++s) {
      REQUIRE(g.cells(b, s) > 0);
      total += g.cells(b, s);
    }
  }
  CHECK(total == kPlanes * kFreqBins * kFrames);
}

TEST_CASE("pooled energy matches the subtracted spectrogram") {
  const auto in = random_specs(5, -0.2f, 1.2f);
  EmptyRoomProfile profile;
  profile.channels = random_specs(6, 0.0f, 1.0f);
  const double w = 0.4;
  std::vector<double> energy(kEnergyFeatures);
  pool_energy(in, profile, w, energy);
  const auto& g = PoolGrid::get();
  for (int m : {0, 3}) {
    const auto sub = subtract_background(in[m], profile.channels[m], w);
    for (int band : {0, 7, 31}) {
      for (int seg : {0, 5}) {
        double sum = 0.0;
        for (int p = 0; p < kPlanes; ++p) {
          for (int b = g.band_edges[band]; b < g.band_edges[band + 1]; ++b) {
            for (int f = g.segment_edges[seg]; f < g.segment_edges[seg + 1]; ++f) {
              sum += double(sub.at(p, b, f)) * sub.at(p, b, f);
            }
          }
        }
        const int idx = (m * kEnergyBands + band) * kEnergySegments + seg;
        REQUIRE(energy[idx] == doctest::Approx(sum / g.cells(band, seg)).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("energy slope matches finite differences") {
  const auto in = random_specs(7, -0.2f, 1.2f);
  EmptyRoomProfile profile;
  profile.channels = random_specs(8, 0.0f, 1.0f);
  std::vector<double> e(kEnergyFeatures), d(kEnergyFeatures);
  std::vector<double> ep(kEnergyFeatures), em(kEnergyFeatures);
  const double w = 0.5, h = 1e-6;
  pool_energy(in, profile, w, e, d);
  pool_energy(in, profile, w + h, ep);
  pool_energy(in, profile, w - h, em);
  for (int i = 0; i < kEnergyFeatures; ++i) {
    const double fd = (ep[i] - em[i]) / (2 * h);
    REQUIRE(std::abs(fd - d[i]) <= 1e-3 * std::max(1.0, std::abs(d[i])));
    REQUIRE(d[i] <= 0.0);
  }
}

TEST_CASE("knot cache is exact at knots and linear between") {
  const auto clip = footfall::testing::noise_clip(4, kSampleRate, 9);
  const auto analysis = analyze_clip(clip);
  EmptyRoomProfile profile;
  profile.channels = random_specs(10, 0.2f, 0.6f);
  const auto cached = cache_features(analysis, profile, 11);
  CHECK(cached.gcc.size() == kGccFeatures);
  std::vector<double> exact(kEnergyFeatures), at(kEnergyFeatures),
      slope(kEnergyFeatures), lo(kEnergyFeatures), hi(kEnergyFeatures);
  pool_energy(analysis.spectrograms, profile, 0.3, exact);
  cached.energy_at(0.3, at, slope);
  for (int i = 0; i < kEnergyFeatures; ++i) {
    REQUIRE(at[i] == doctest::Approx(exact[i]).epsilon(1e-6));
  }
  cached.energy_at(0.35, at, slope);
  pool_energy(analysis.spectrograms, profile, 0.3, lo);
  pool_energy(analysis.spectrograms, profile, 0.4, hi);
  for (int i = 0; i < kEnergyFeatures; ++i) {
    REQUIRE(at[i] == doctest::Approx(0.5 * (lo[i] + hi[i])).epsilon(1e-5));
    REQUIRE(slope[i] == doctest::Approx((hi[i] - lo[i]) / 0.1).epsilon(1e-4).scale(1e-3));
  }
}

TEST_CASE("gcc block peaks at the inter-channel delay") {
  const auto clip = shifted_clip(4, 11);
  const auto fv = extract_features(clip, EmptyRoomProfile{.channels = std::vector<Spectrogram>(4)}, 0.5);
  // Pair order: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3); channel c lags by 4c.
  const int expected[kNumPairs] = {4, 8, 12, 4, 8, 4};
  for (int p = 0; p < kNumPairs; ++p) {
    const auto curve = fv.gcc().subspan(p * kGccLags, kGccLags);
    const auto best = std::max_element(curve.begin(), curve.end()) - curve.begin();
    CHECK(best - kGccHalfSpan == expected[p]);
  }
}

TEST_CASE("features are scale invariant") {
  const auto clip = footfall::testing::noise_clip(4, kSampleRate, 12);
  auto loud = clip;
  for (auto& v : loud.samples()) v *= 8.0f;
  EmptyRoomProfile profile;
  profile.channels = random_specs(13, 0.2f, 0.6f);
  const auto a = extract_features(clip, profile, 0.5);
  const auto b = extract_features(loud, profile, 0.5);
  for (int i = 0; i < kFeatureDim; ++i) {
    REQUIRE(b.values[i] == doctest::Approx(a.values[i]).epsilon(1e-5).scale(1e-6));
  }
}

TEST_CASE("silent channels give flat gcc curves") {
  auto clip = footfall::testing::noise_clip(4, kSampleRate, 14);
  for (auto& v : clip.channel(2)) v = 0.0f;
  const auto block = kernels::gcc_block(normalize_rms(clip), Exec::kSerial);
  for (int l = 0; l < kGccLags; ++l) CHECK(block[1 * kGccLags + l] == 0.0);
  CHECK(std::any_of(block.begin(), block.begin() + kGccLags,
                    [](double v) { return v != 0.0; }));
}

}  // TEST_SUITE

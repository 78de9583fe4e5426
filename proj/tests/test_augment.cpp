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

#include "doctest.h"
#include "footfall/augment.hpp"
#include "footfall/error.hpp"
#include "test_util.hpp"

using namespace footfall;
using footfall::testing::noise_clip;

namespace {

void check_close(const MultiChannelClip& a, const MultiChannelClip& b,
                 float tol) {
  REQUIRE(a.samples().size() == b.samples().size());
  for (std::size_t i = 0; i < a.samples().size(); ++i) {
    REQUIRE(std::abs(a.samples()[i] - b.samples()[i]) <= tol);
  }
}

EmptyRoomProfile flat_profile(float v) {
  EmptyRoomProfile p;
  p.channels.resize(4);
  for (auto& s : p.channels) std::fill(s.values().begin(), s.values().end(), v);
  return p;
}

AugmentationPool small_pool() {
  AugmentationPool pool;
  for (int k = 0; k < 3; ++k) {
    pool.room_ids.push_back("aug" + std::to_string(k));
    pool.recordings.push_back(noise_clip(4, 3 * kSampleRate, 40 + k, 0.01));
    pool.profiles.push_back(flat_profile(0.1f * (k + 1)));
  }
  return pool;
}

}  // namespace

TEST_SUITE("augment") {

TEST_CASE("waveform mix endpoints") {
  const auto r = noise_clip(4, 4410, 1, 0.05);
  const auto a = noise_clip(4, 4410, 2, 0.005);
  check_close(mix_waveforms(r, a, 0.0), normalize_rms(r), 1e-7f);
  check_close(mix_waveforms(r, a, 1.0), normalize_rms(a), 1e-7f);
  check_close(mix_waveforms(r, r, 0.37), normalize_rms(r), 1e-7f);
}

TEST_CASE("waveform mix is renormalized") {
  const auto r = noise_clip(4, 4410, 3, 0.05);
  const auto a = noise_clip(4, 4410, 4, 0.5);
  for (double w : {0.0, 0.1, 0.3, 0.5, 0.9, 1.0}) {
    CHECK(std::abs(rms(mix_waveforms(r, a, w)).pooled - kTargetRms) < 1e-9);
  }
  // Both inputs are normalized first, so the level of x_aug does not matter.
  auto louder = a;
  for (auto& v : louder.samples()) v *= 10.0f;
  check_close(mix_waveforms(r, a, 0.3), mix_waveforms(r, louder, 0.3), 1e-7f);
}

TEST_CASE("waveform mix errors") {
  const auto r = noise_clip(4, 4410, 5);
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kIoFailure;
  };
  CHECK(code([&] { mix_waveforms(r, noise_clip(4, 4000, 6), 0.3); }) ==
        Errc::kLengthMismatch);
  CHECK(code([&] { mix_waveforms(r, MultiChannelClip(4, 4410), 0.3); }) ==
        Errc::kSilentClip);
  CHECK(code([&] { mix_waveforms(r, r, 1.5); }) == Errc::kOutOfRange);
}

TEST_CASE("profile mix") {
  const auto n = flat_profile(0.2f), s = flat_profile(0.6f);
  CHECK(mix_profiles(n, s, 0.0).channels == n.channels);
  CHECK(mix_profiles(n, n, 0.8).channels == n.channels);
  CHECK(mix_profiles(n, s, 0.5).channels[2].at(1, 100, 100) ==
        doctest::Approx(0.4));
  const auto m = mix_profiles(n, s, 0.3);
  for (float v : m.channels[0].values()) {
    REQUIRE(v >= 0.2f);
    REQUIRE(v <= 0.6f);
  }
  EmptyRoomProfile two;
  two.channels.resize(2);
  CHECK_THROWS_AS(mix_profiles(n, two, 0.5), Error);
}

TEST_CASE("draws are reproducible per epoch and sample") {
  const auto pool = small_pool();
  const auto a = draw_augmentation(pool, 9, 2, 17, 0.3);
  const auto b = draw_augmentation(pool, 9, 2, 17, 0.3);
  CHECK(a.pool_index == b.pool_index);
  CHECK(a.offset == b.offset);
  CHECK(a.w_aug == 0.3);
  // Offsets land on the 4 Hz clip grid inside the recording.
  int differ = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto r = draw_augmentation(pool, 9, 0, i, 0.3);
    REQUIRE(r.pool_index < pool.size());
    REQUIRE(r.offset % 11025 == 0);
    REQUIRE(r.offset + kSampleRate <= pool.recordings[r.pool_index].n_samples());
    const auto s = draw_augmentation(pool, 9, 1, i, 0.3);
    if (s.pool_index != r.pool_index || s.offset != r.offset) ++differ;
  }
  CHECK(differ > 25);
  CHECK_THROWS_AS(draw_augmentation(AugmentationPool{}, 1, 0, 0, 0.3), Error);
}

TEST_CASE("one record drives both mixes") {
  const auto pool = small_pool();
  const auto clip = noise_clip(4, kSampleRate, 50);
  const auto natural = flat_profile(0.5f);
  auto rec = draw_augmentation(pool, 3, 0, 4, 0.5);
  const auto out = apply_augmentation(rec, clip, natural, pool);
  const auto foreign = pool.recordings[rec.pool_index].slice(rec.offset, kSampleRate);
  check_close(out.clip, mix_waveforms(clip, foreign, 0.5), 0.0f);
  const float want = 0.5f * 0.5f + 0.5f * pool.profiles[rec.pool_index].channels[0].values()[0];
  CHECK(out.profile.channels[3].values()[123] == doctest::Approx(want));

  rec.w_aug = 0.0;
  const auto off = apply_augmentation(rec, clip, natural, pool);
  CHECK(off.clip == clip);
  CHECK(off.profile.channels == natural.channels);
}

}  // TEST_SUITE

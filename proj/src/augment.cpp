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

#include "footfall/augment.hpp"

#include <random>

#include "footfall/error.hpp"

namespace footfall {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

MultiChannelClip mix_waveforms(const MultiChannelClip& x_r,
                               const MultiChannelClip& x_aug, double w_aug) {
  if (x_r.n_samples() != x_aug.n_samples() ||
      x_r.n_channels() != x_aug.n_channels()) {
    throw Error(Errc::kLengthMismatch, "augmentation clip shape differs");
  }
  if (!(w_aug >= 0.0 && w_aug <= 1.0)) {
    throw Error(Errc::kOutOfRange, "w_aug must lie in [0, 1]");
  }
  const MultiChannelClip r = normalize_rms(x_r);
  const MultiChannelClip a = normalize_rms(x_aug);
  MultiChannelClip syn(r.n_channels(), r.n_samples(), r.sample_rate());
  auto rs = r.samples();
  auto as = a.samples();
  auto out = syn.samples();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>((1.0 - w_aug) * rs[i] + w_aug * as[i]);
  }
  return normalize_rms(syn);
}

EmptyRoomProfile mix_profiles(const EmptyRoomProfile& natural,
                              const EmptyRoomProfile& synthetic, double w_aug) {
  if (natural.channels.size() != synthetic.channels.size()) {
    throw Error(Errc::kShapeMismatch, "profile channel counts differ");
  }
  EmptyRoomProfile out;
  out.room_id = natural.room_id;
  out.robot_condition = natural.robot_condition;
  out.channels.resize(natural.channels.size());
  for (std::size_t c = 0; c < out.channels.size(); ++c) {
    auto n = natural.channels[c].values();
    auto s = synthetic.channels[c].values();
    auto o = out.channels[c].values();
    for (std::size_t i = 0; i < o.size(); ++i) {
      o[i] = static_cast<float>((1.0 - w_aug) * n[i] + w_aug * s[i]);
    }
  }
  return out;
}

AugmentationRecord draw_augmentation(const AugmentationPool& pool,
                                     std::uint64_t seed, std::uint64_t epoch,
                                     std::uint64_t sample_index,
                                     double w_aug) {
  if (pool.empty()) {
    throw Error(Errc::kEmptyDataset, "augmentation pool is empty");
  }
  std::mt19937_64 rng(mix_seed(mix_seed(seed, epoch), sample_index));
  AugmentationRecord rec;
  rec.w_aug = w_aug;
  rec.pool_index = std::uniform_int_distribution<std::size_t>(
      0, pool.size() - 1)(rng);
  const auto windows = sample_clips(pool.recordings[rec.pool_index].n_samples());
  rec.offset = windows[std::uniform_int_distribution<std::size_t>(
                           0, windows.size() - 1)(rng)]
                   .offset;
  return rec;
}

AugmentedInput apply_augmentation(const AugmentationRecord& record,
                                  const MultiChannelClip& clip,
                                  const EmptyRoomProfile& natural,
                                  const AugmentationPool& pool) {
  if (record.w_aug == 0.0) return {clip, natural};
  const MultiChannelClip& source = pool.recordings.at(record.pool_index);
  const MultiChannelClip foreign = source.slice(record.offset, clip.n_samples());
  return {mix_waveforms(clip, foreign, record.w_aug),
          mix_profiles(natural, pool.profiles.at(record.pool_index),
                       record.w_aug)};
}

}  // namespace footfall

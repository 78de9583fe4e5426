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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "footfall/audio.hpp"
#include "footfall/spectro.hpp"

namespace footfall {

inline constexpr double kDefaultAugmentationWeight = 0.3;

// x_syn = (1 - w) * norm(x_r) + w * norm(x_aug), normalized again.
// Throws kLengthMismatch, kSilentClip.
MultiChannelClip mix_waveforms(const MultiChannelClip& x_r,
                               const MultiChannelClip& x_aug, double w_aug);

// (1 - w) * natural + w * synthetic, element-wise per channel.
EmptyRoomProfile mix_profiles(const EmptyRoomProfile& natural,
                              const EmptyRoomProfile& synthetic, double w_aug);

// Foreign empty rooms available for mixing.
struct AugmentationPool {
  std::vector<std::string> room_ids;
  std::vector<MultiChannelClip> recordings;
  std::vector<EmptyRoomProfile> profiles;

  std::size_t size() const { return recordings.size(); }
  bool empty() const { return recordings.empty(); }
};

// The choice made for one training sample. Carrying w_aug here keeps the
// waveform and profile mixes on the same weight.
struct AugmentationRecord {
  std::size_t pool_index = 0;
  std::size_t offset = 0;  // samples into the pool recording
  double w_aug = 0.0;
};

// Uniform draw of a pool room and a 4 Hz-grid clip inside it, keyed by
// (seed, epoch, sample index) so redraws are reproducible.
AugmentationRecord draw_augmentation(const AugmentationPool& pool,
                                     std::uint64_t seed, std::uint64_t epoch,
                                     std::uint64_t sample_index, double w_aug);

struct AugmentedInput {
  MultiChannelClip clip;
  EmptyRoomProfile profile;
};

AugmentedInput apply_augmentation(const AugmentationRecord& record,
                                  const MultiChannelClip& clip,
                                  const EmptyRoomProfile& natural,
                                  const AugmentationPool& pool);

// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace footfall
